"""Table-driven exact arithmetic in F_{p^k}.

Elements are integer indices in [0, p^k): the base-p digits of the index,
little-endian, are the coefficients of the residue polynomial modulo a
canonical irreducible. Multiplication goes through log/exp tables w.r.t. a
fixed generator; addition is digit-wise. Fields small enough also carry
dense (size x size) add/mul tables, which is what the enumeration kernels
index into.

The canonical modulus is the lexicographically smallest monic irreducible
of degree k over F_p, comparing coefficient tuples low-degree-first, so
element indices mean the same thing across runs and serialized documents.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, List, Tuple

import numpy as np

from .errors import (
    DivisionByZero,
    FieldMismatch,
    NonPrimeCharacteristic,
    OddExtension,
    SizeBudgetExceeded,
)

SIZE_BUDGET = 1 << 20
# dense (size x size) tables kept only while they stay under 2^21 entries
DENSE_TABLE_LIMIT = 1448


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _poly_trim(a: List[int]) -> List[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(num: List[int], den: List[int], p: int) -> List[int]:
    """Remainder of num by monic den, coefficients little-endian mod p."""
    r = list(num)
    dd = len(den) - 1
    for i in range(len(r) - 1, dd - 1, -1):
        c = r[i] % p
        if c:
            for j in range(dd + 1):
                r[i - dd + j] = (r[i - dd + j] - c * den[j]) % p
    del r[dd:]
    return r


def _poly_mul(a: List[int], b: List[int], p: int) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _is_irreducible(coeffs: List[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    k = len(coeffs) - 1
    if k == 1:
        return True
    for deg in range(1, k // 2 + 1):
        for idx in range(p**deg):
            den = []
            n = idx
            for _ in range(deg):
                den.append(n % p)
                n //= p
            den.append(1)
            if not _poly_trim(_poly_mod(coeffs, den, p)):
                return False
    return True


def canonical_modulus(p: int, k: int) -> Tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k over F_p."""
    if k == 1:
        return (0, 1)
    for idx in range(p**k):
        low = []
        n = idx
        for pos in range(k):
            low.append(0)
        # lex order on (c_0, ..., c_{k-1}): c_0 is the most significant slot
        for pos in range(k - 1, -1, -1):
            low[pos] = n % p
            n //= p
        cand = low + [1]
        if _is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # unreachable


def _factor(n: int) -> List[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


class Field:
    """F_{p^k} with precomputed log/exp, conjugation, and digit tables."""

    def __init__(self, p: int, k: int):
        if not _is_prime(p):
            raise NonPrimeCharacteristic(f"characteristic {p} is not prime")
        size = p**k
        if size > SIZE_BUDGET:
            raise SizeBudgetExceeded(
                f"field size {p}^{k} = {size} exceeds budget {SIZE_BUDGET}"
            )
        self.p = p
        self.k = k
        self.size = size
        self.modulus: Tuple[int, ...] = canonical_modulus(p, k)
        self.q = p ** (k // 2) if k % 2 == 0 else None

        # digit matrix: row i = base-p digits of index i, little-endian
        idx = np.arange(size, dtype=np.int64)
        digs = np.empty((size, k), dtype=np.uint8)
        for j in range(k):
            digs[:, j] = idx % p
            idx //= p
        self.digits = digs
        self._powp = p ** np.arange(k, dtype=np.int64)

        self._build_mul_tables()
        self.neg_t = self._pack((p - digs.astype(np.int64)) % p)
        inv = np.zeros(size, dtype=np.uint32)
        n = size - 1
        if n:
            inv[self.exp_t[:n]] = self.exp_t[(n - self.log_t[self.exp_t[:n]]) % n]
        self.inv_t = inv

        if self.q is not None:
            q, order = self.q, size - 1
            conj = np.zeros(size, dtype=np.uint32)
            if order:
                nz = self.exp_t[:order]
                conj[nz] = self.exp_t[(self.log_t[nz] * q) % order]
            self.conj_t = conj
            norm = np.zeros(size, dtype=np.uint32)
            if order:
                norm[nz] = self.exp_t[(self.log_t[nz] * (q + 1)) % order]
            self.norm_t = norm
            pre: dict = {}
            for x in range(size):
                pre.setdefault(int(norm[x]), []).append(x)
            self.norm_preimages = {a: tuple(v) for a, v in pre.items()}
        else:
            self.conj_t = None
            self.norm_t = None
            self.norm_preimages = None

        if size <= DENSE_TABLE_LIMIT:
            dt = np.uint8 if size <= 256 else np.uint16
            s64 = digs.astype(np.int64)
            self.add_t = self._pack(
                (s64[:, None, :] + s64[None, :, :]) % p
            ).astype(dt)
            mul = np.zeros((size, size), dtype=dt)
            if n:
                logs = self.log_t[1:].astype(np.int64)
                mul[1:, 1:] = self.exp_t[(logs[:, None] + logs[None, :]) % n]
            self.mul_t = mul
        else:
            self.add_t = None
            self.mul_t = None

    def _pack(self, digit_rows: np.ndarray) -> np.ndarray:
        return (digit_rows.astype(np.int64) @ self._powp).astype(np.uint32)

    def _build_mul_tables(self) -> None:
        p, k, size = self.p, self.k, self.size
        n = size - 1
        if n == 0:
            self.exp_t = np.zeros(0, dtype=np.uint32)
            self.log_t = np.zeros(size, dtype=np.uint32)
            self.generator = 1 if size > 1 else 0
            return
        # multiplication by a fixed element is F_p-linear on digit vectors
        mod = list(self.modulus)
        primes = _factor(n)

        def mul_idx(a: int, b: int) -> int:
            da = [(a // p**j) % p for j in range(k)]
            db = [(b // p**j) % p for j in range(k)]
            r = _poly_mod(_poly_mul(da, db, p), mod, p)
            return sum(c * p**j for j, c in enumerate(r))

        def pow_idx(a: int, e: int) -> int:
            r, b = 1, a
            while e:
                if e & 1:
                    r = mul_idx(r, b)
                b = mul_idx(b, b)
                e >>= 1
            return r

        g = None
        for cand in range(2, size):
            if all(pow_idx(cand, n // ell) != 1 for ell in primes):
                g = cand
                break
        if g is None:
            g = 1  # size == 2: the trivial group
        self.generator = g

        # t -> g*t as a k x k matrix over F_p, iterated to fill the table
        cols = []
        for j in range(k):
            img = mul_idx(g, p**j)
            cols.append([(img // p**i) % p for i in range(k)])
        M = np.array(cols, dtype=np.int64).T % p
        exp = np.empty(n, dtype=np.uint32)
        v = np.zeros(k, dtype=np.int64)
        v[0] = 1
        powp = self._powp
        for i in range(n):
            exp[i] = int(v @ powp)
            v = (M @ v) % p
        self.exp_t = exp
        log = np.zeros(size, dtype=np.uint32)
        log[exp] = np.arange(n, dtype=np.uint32)
        self.log_t = log

    # index-level arithmetic -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.add_t is not None:
            return int(self.add_t[a, b])
        d = (self.digits[a].astype(np.int64) + self.digits[b]) % self.p
        return int(d @ self._powp)

    def neg(self, a: int) -> int:
        return int(self.neg_t[a])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.mul_t is not None:
            return int(self.mul_t[a, b])
        if a == 0 or b == 0:
            return 0
        n = self.size - 1
        return int(self.exp_t[(int(self.log_t[a]) + int(self.log_t[b])) % n])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return int(self.inv_t[a])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise DivisionByZero("negative power of zero")
            return 0
        n = self.size - 1
        if n == 0:
            return 1
        return int(self.exp_t[(int(self.log_t[a]) * e) % n])

    def conj(self, a: int) -> int:
        if self.conj_t is None:
            raise OddExtension(
                f"F_{self.p}^{self.k} is not a quadratic extension"
            )
        return int(self.conj_t[a])

    def norm(self, a: int) -> int:
        if self.norm_t is None:
            raise OddExtension(
                f"F_{self.p}^{self.k} is not a quadratic extension"
            )
        return int(self.norm_t[a])

    # element-level API ------------------------------------------------------

    def elem(self, i: int) -> "FieldElement":
        if not 0 <= i < self.size:
            raise FieldMismatch(f"index {i} outside field of size {self.size}")
        return FieldElement(self, i)

    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def gen(self) -> "FieldElement":
        return FieldElement(self, self.generator)

    def __iter__(self) -> Iterator["FieldElement"]:
        for i in range(self.size):
            yield FieldElement(self, i)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Field)
            and self.p == other.p
            and self.k == other.k
        )

    def __hash__(self) -> int:
        return hash((self.p, self.k))

    def __repr__(self) -> str:
        return f"Field(p={self.p}, k={self.k}, size={self.size})"


class FieldElement:
    __slots__ = ("field", "i")

    def __init__(self, field: Field, i: int):
        self.field = field
        self.i = i

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatch("elements of different fields")
            return other
        if isinstance(other, (int, np.integer)):
            return FieldElement(self.field, int(other) % self.field.p)
        raise FieldMismatch(f"cannot combine field element with {type(other)}")

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, self.field.add(self.i, o.i))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, self.field.sub(self.i, o.i))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.i))

    def __mul__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, self.field.mul(self.i, o.i))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, self.field.mul(self.i, self.field.inv(o.i)))

    def __pow__(self, e: int):
        if e < 0:
            return FieldElement(self.field, self.field.pow(self.field.inv(self.i), -e))
        return FieldElement(self.field, self.field.pow(self.i, e))

    def conjugate(self) -> "FieldElement":
        return FieldElement(self.field, self.field.conj(self.i))

    def norm(self) -> "FieldElement":
        return FieldElement(self.field, self.field.norm(self.i))

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.i == other.i
        if isinstance(other, int):
            return self.i == other % self.field.p and self.i < self.field.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.k, self.i))

    def __bool__(self) -> bool:
        return self.i != 0

    def __int__(self) -> int:
        return self.i

    def __repr__(self) -> str:
        return f"<{self.i} in F_{self.field.size}>"


@lru_cache(maxsize=None)
def field_create(p: int, k: int) -> Field:
    """Return F_{p^k} with the canonical modulus; cached per (p, k)."""
    return Field(p, k)


def quadratic_field(q: int) -> Field:
    """F_{q^2} for a prime power q; the field whose .q attribute is q."""
    if q < 2:
        raise NonPrimeCharacteristic(f"{q} is not a prime power")
    p = 2
    while p * p <= q:
        if q % p == 0:
            break
        p += 1
    if q % p:
        p = q
    e = 0
    n = q
    while n % p == 0:
        n //= p
        e += 1
    if n != 1:
        raise NonPrimeCharacteristic(f"{q} is not a prime power")
    return field_create(p, 2 * e)


def arith(x: FieldElement, y, op: str) -> FieldElement:
    """Dispatch {add, mul, inv, neg}; inv and neg ignore y."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return FieldElement(x.field, x.field.inv(x.i))
    if op == "neg":
        return -x
    raise FieldMismatch(f"unknown op {op!r}")


def conjugate(x: FieldElement) -> FieldElement:
    return x.conjugate()


def norm(x: FieldElement) -> FieldElement:
    return x.norm()


def enumerate_field(field: Field) -> Iterator[FieldElement]:
    return iter(field)


@lru_cache(maxsize=None)
def embed_table(base_key: Tuple[int, int], ext_key: Tuple[int, int]) -> np.ndarray:
    """Index map of the embedding F_{p^j} -> F_{p^k} (j | k).

    Sends the residue class of t to the smallest-index root of the base
    modulus in the extension; evaluation at that root is a ring
    homomorphism, hence injective on a field.
    """
    base = field_create(*base_key)
    ext = field_create(*ext_key)
    if base.p != ext.p or ext.k % base.k != 0:
        raise FieldMismatch(f"no embedding F_{base.size} -> F_{ext.size}")
    root = None
    for x in range(ext.size):
        acc = 0
        for c in reversed(base.modulus):
            acc = ext.add(ext.mul(acc, x), int(c))
        if acc == 0:
            root = x
            break
    if root is None:
        raise FieldMismatch("base modulus has no root in extension")
    table = np.empty(base.size, dtype=np.uint32)
    for i in range(base.size):
        acc = 0
        for c in reversed(base.digits[i].tolist()):
            acc = ext.add(ext.mul(acc, root), int(c))
        table[i] = acc
    return table


def embed(base: Field, ext: Field) -> np.ndarray:
    return embed_table((base.p, base.k), (ext.p, ext.k))
