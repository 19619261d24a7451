"""Error taxonomy shared by every module.

Three families, mapped to CLI exit codes:

  * UsageError (exit 2): the caller handed us something malformed.
  * OperationalError (exit 1): a well-formed request that could not be
    satisfied (search budget exhausted, construction not found).
  * TrichotomyViolated (exit 3): an internal consistency check failed.
    The section trichotomies are theorems; seeing a count outside the
    allowed set means the arithmetic itself is broken, so we fail loudly
    instead of reporting a value.
"""


class HVLabError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class UsageError(HVLabError):
    """Malformed input or violated precondition."""

    exit_code = 2


class NonPrimeCharacteristic(UsageError):
    pass


class SizeBudgetExceeded(UsageError):
    pass


class DivisionByZero(UsageError):
    pass


class FieldMismatch(UsageError):
    pass


class OddExtension(UsageError):
    pass


class DimensionMismatch(UsageError):
    pass


class ContainmentViolated(UsageError):
    pass


class EmptyInput(UsageError):
    pass


class ArityMismatch(UsageError):
    pass


class ZeroPolynomial(UsageError):
    pass


class NotHermitian(UsageError):
    pass


class PointNotOnVariety(UsageError):
    pass


class PointNotOnSurface(UsageError):
    pass


class DegenerateForm(UsageError):
    pass


class NotAQuadric(UsageError):
    pass


class OperationalError(HVLabError):
    """A legitimate request the library could not fulfil."""

    exit_code = 1


class InsufficientNonTangent(OperationalError):
    pass


class InsufficientPlanes(OperationalError):
    pass


class VertexOnBase(OperationalError):
    pass


class BaseCurveSearchFailed(OperationalError):
    pass


class ConstructionNotFound(OperationalError):
    pass


class BudgetExceeded(OperationalError):
    pass


class TrichotomyViolated(HVLabError):
    """A proven trichotomy failed; indicates an implementation bug."""

    exit_code = 3
