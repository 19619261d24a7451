"""Sparse homogeneous polynomials over F_{q^2} and small extensions.

Terms live in a dict keyed by exponent tuples; every stored coefficient is
nonzero and every exponent vector sums to the declared degree, so the zero
polynomial is exactly the empty term map with a degree tag. Graded-lex
(exponent tuples descending) is the canonical term order for hashing and
serialization.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from . import kernels
from .errors import (
    ArityMismatch,
    DimensionMismatch,
    SizeBudgetExceeded,
    TrichotomyViolated,
    ZeroPolynomial,
)
from .field import Field, FieldElement, embed, field_create
from .geometry import Flat, ProjPoint, flat_from_rows, null_space

DUAL_SCAN_BUDGET = 1 << 21


class HomogeneousPoly:
    __slots__ = ("field", "nvars", "degree", "terms", "_arrays")

    def __init__(
        self,
        field: Field,
        nvars: int,
        degree: int,
        terms: Dict[Tuple[int, ...], int],
    ):
        clean: Dict[Tuple[int, ...], int] = {}
        for exps, coeff in terms.items():
            exps = tuple(int(e) for e in exps)
            coeff = int(coeff)
            if len(exps) != nvars:
                raise ArityMismatch(f"term {exps} has {len(exps)} vars, not {nvars}")
            if sum(exps) != degree:
                raise ArityMismatch(f"term {exps} is not homogeneous of degree {degree}")
            if coeff:
                clean[exps] = coeff
        self.field = field
        self.nvars = nvars
        self.degree = degree
        self.terms = clean
        self._arrays: Optional[Tuple[np.ndarray, np.ndarray]] = None

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> List[Tuple[Tuple[int, ...], int]]:
        return sorted(self.terms.items(), key=lambda t: t[0], reverse=True)

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._arrays is None:
            items = self.sorted_terms()
            exps = np.array([e for e, _ in items], dtype=np.uint8).reshape(
                len(items), self.nvars
            )
            coeffs = np.array([c for _, c in items], dtype=np.uint32)
            self._arrays = (exps, coeffs)
        return self._arrays

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HomogeneousPoly)
            and self.field == other.field
            and self.nvars == other.nvars
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash(
            (self.field.p, self.field.k, self.nvars, self.degree)
            + tuple(self.sorted_terms())
        )

    def __mul__(self, other: "HomogeneousPoly") -> "HomogeneousPoly":
        return poly_product_pair(self, other)

    def __repr__(self) -> str:
        if self.is_zero:
            return f"HomogeneousPoly(0, deg={self.degree})"
        parts = [f"{c}*x^{list(e)}" for e, c in self.sorted_terms()[:4]]
        more = "..." if len(self.terms) > 4 else ""
        return f"HomogeneousPoly({' + '.join(parts)}{more})"


@dataclass
class PlaneCubicClass:
    tag: str  # AbsolutelyIrreducible | IrreducibleNotAbsolutely | Reducible
    witnesses: List[HomogeneousPoly] = dc_field(default_factory=list)


# ------------------------------------------------------------- construction


def zero_poly(field: Field, nvars: int, degree: int) -> HomogeneousPoly:
    return HomogeneousPoly(field, nvars, degree, {})


def monomial(field: Field, exps: Sequence[int], coeff: int = 1) -> HomogeneousPoly:
    exps = tuple(int(e) for e in exps)
    return HomogeneousPoly(field, len(exps), sum(exps), {exps: coeff})


def linear_form(field: Field, covec: Sequence[int]) -> HomogeneousPoly:
    n = len(covec)
    terms = {}
    for i, c in enumerate(covec):
        if c:
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = int(c)
    return HomogeneousPoly(field, n, 1, terms)


def poly_add(a: HomogeneousPoly, b: HomogeneousPoly) -> HomogeneousPoly:
    if a.degree != b.degree or a.nvars != b.nvars:
        raise ArityMismatch("sum of inhomogeneous polynomials")
    fld = a.field
    out = dict(a.terms)
    for e, c in b.terms.items():
        v = fld.add(out.get(e, 0), c)
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return HomogeneousPoly(fld, a.nvars, a.degree, out)


def poly_scale(a: HomogeneousPoly, c: int) -> HomogeneousPoly:
    if c == 0:
        return zero_poly(a.field, a.nvars, a.degree)
    fld = a.field
    return HomogeneousPoly(
        fld, a.nvars, a.degree, {e: fld.mul(c, v) for e, v in a.terms.items()}
    )


def poly_product_pair(a: HomogeneousPoly, b: HomogeneousPoly) -> HomogeneousPoly:
    if a.nvars != b.nvars:
        raise ArityMismatch("product across different variable counts")
    if a.field != b.field:
        raise ArityMismatch("product across different fields")
    fld = a.field
    out: Dict[Tuple[int, ...], int] = {}
    for e1, c1 in a.terms.items():
        for e2, c2 in b.terms.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            v = fld.add(out.get(e, 0), fld.mul(c1, c2))
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return HomogeneousPoly(fld, a.nvars, a.degree + b.degree, out)


def poly_product(polys: Sequence[HomogeneousPoly]) -> HomogeneousPoly:
    acc = polys[0]
    for p in polys[1:]:
        acc = poly_product_pair(acc, p)
    return acc


def divide_by_linear(
    f: HomogeneousPoly, l: HomogeneousPoly
) -> Optional[HomogeneousPoly]:
    """Exact quotient f / l for a linear form l, or None if l does not divide.

    Synthetic division in the pivot variable of l; the remainder must
    vanish identically for the quotient to be returned.
    """
    if l.field != f.field or l.nvars != f.nvars:
        raise ArityMismatch("divisor does not match the polynomial ring")
    if l.degree != 1 or l.is_zero:
        raise ZeroPolynomial("divisor must be a nonzero linear form")
    fld = f.field
    if f.is_zero:
        return zero_poly(fld, f.nvars, max(f.degree - 1, 0))
    cov = [0] * f.nvars
    for e, c in l.terms.items():
        cov[list(e).index(1)] = c
    j = next(i for i, c in enumerate(cov) if c)
    scale = fld.inv(cov[j])
    # f = l*g  iff  scale*f = (scale*l)*g with scale*l monic in x_j
    rneg: Dict[Tuple[int, ...], int] = {}
    for i, c in enumerate(cov):
        if i != j and c:
            e = [0] * f.nvars
            e[i] = 1
            rneg[tuple(e)] = fld.neg(fld.mul(scale, c))

    def fold(base: Dict, carry: Dict) -> Dict:
        out = dict(base)
        for e, c in carry.items():
            for er, cr in rneg.items():
                key = tuple(a + b for a, b in zip(e, er))
                v = fld.add(out.get(key, 0), fld.mul(c, cr))
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return out

    d = f.degree
    fb: List[Dict[Tuple[int, ...], int]] = [dict() for _ in range(d + 1)]
    for e, c in f.terms.items():
        e0 = list(e)
        e0[j] = 0
        fb[e[j]][tuple(e0)] = fld.mul(scale, c)
    g: List[Dict[Tuple[int, ...], int]] = [dict() for _ in range(d)]
    g[d - 1] = fb[d]
    for t in range(d - 1, 0, -1):
        g[t - 1] = fold(fb[t], g[t])
    if fold(fb[0], g[0]):
        return None
    terms: Dict[Tuple[int, ...], int] = {}
    for t in range(d):
        for e0, c in g[t].items():
            e = list(e0)
            e[j] = t
            terms[tuple(e)] = c
    return HomogeneousPoly(fld, f.nvars, d - 1, terms)


def partial_derivative(a: HomogeneousPoly, i: int) -> HomogeneousPoly:
    """Formal partial w.r.t. x_i; exponent multipliers are taken mod p."""
    fld = a.field
    out: Dict[Tuple[int, ...], int] = {}
    for e, c in a.terms.items():
        if e[i] == 0:
            continue
        mult = e[i] % fld.p
        if mult == 0:
            continue
        ne = list(e)
        ne[i] -= 1
        v = fld.add(out.get(tuple(ne), 0), fld.mul(mult, c))
        if v:
            out[tuple(ne)] = v
        else:
            out.pop(tuple(ne), None)
    return HomogeneousPoly(fld, a.nvars, max(a.degree - 1, 0), out)


def map_coefficients(a: HomogeneousPoly, target: Field, table) -> HomogeneousPoly:
    """Push coefficients through an index map (embedding or Frobenius)."""
    return HomogeneousPoly(
        target, a.nvars, a.degree, {e: int(table[c]) for e, c in a.terms.items()}
    )


def embed_poly(a: HomogeneousPoly, ext: Field) -> HomogeneousPoly:
    return map_coefficients(a, ext, embed(a.field, ext))


# --------------------------------------------------------------- evaluation


def evaluate(f: HomogeneousPoly, p: ProjPoint) -> FieldElement:
    if len(p.coords) != f.nvars:
        raise ArityMismatch(
            f"point has {len(p.coords)} coordinates, polynomial {f.nvars} variables"
        )
    fld = f.field
    acc = 0
    for e, c in f.terms.items():
        term = c
        for x, ei in zip(p.coords, e):
            if ei:
                if x == 0:
                    term = 0
                    break
                term = fld.mul(term, fld.pow(x, ei))
        acc = fld.add(acc, term)
    return FieldElement(fld, acc)


def eval_coords(f: HomogeneousPoly, coords: np.ndarray) -> np.ndarray:
    """Vectorized evaluation on coordinate rows; returns element indices."""
    if coords.shape[1] != f.nvars:
        raise ArityMismatch("coordinate width does not match variable count")
    exps, coeffs = f.arrays()
    return kernels.eval_poly_many(coords, exps, coeffs, f.field)


def eval_ids(f: HomogeneousPoly, ids: np.ndarray) -> np.ndarray:
    coords = kernels.decode_ids(ids, f.field.size, f.nvars - 1)
    return eval_coords(f, coords)


def zero_ids(f: HomogeneousPoly, chunk: int = 1 << 20) -> np.ndarray:
    """Sorted ids of the rational zero set; streams in chunks."""
    if f.is_zero:
        raise ZeroPolynomial("zero polynomial has no hypersurface")
    total = kernels.num_points(f.field.size, f.nvars - 1)
    found = []
    for lo in range(0, total, chunk):
        ids = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        vals = eval_ids(f, ids)
        found.append(ids[vals == 0])
    return np.concatenate(found) if found else np.zeros(0, dtype=np.int64)


def zero_set(f: HomogeneousPoly, fld: Optional[Field] = None) -> Set[ProjPoint]:
    if fld is not None and fld != f.field:
        raise ArityMismatch("field does not match the polynomial's")
    ids = zero_ids(f)
    coords = kernels.decode_ids(ids, f.field.size, f.nvars - 1)
    return {ProjPoint(f.field, row.tolist()) for row in coords}


# -------------------------------------------------------------- restriction


def restrict_to_flat(f: HomogeneousPoly, x: Flat) -> HomogeneousPoly:
    """Substitute the flat's RREF parametrization; result in dim+1 variables."""
    if x.m + 1 != f.nvars:
        raise DimensionMismatch("flat lives in a different ambient space")
    if x.field != f.field:
        raise DimensionMismatch("flat over a different field")
    fld = f.field
    w = x.dim + 1
    if f.is_zero:
        return zero_poly(fld, w, f.degree)
    # linear form of each ambient variable in the flat's parameters
    subs: List[Dict[Tuple[int, ...], int]] = []
    for i in range(f.nvars):
        form: Dict[Tuple[int, ...], int] = {}
        for a in range(w):
            c = x.basis[a][i]
            if c:
                e = [0] * w
                e[a] = 1
                form[tuple(e)] = c
        subs.append(form)

    # powers of each substitution form, computed on demand
    pow_cache: Dict[Tuple[int, int], Dict[Tuple[int, ...], int]] = {}

    def form_power(i: int, e: int) -> Dict[Tuple[int, ...], int]:
        key = (i, e)
        if key in pow_cache:
            return pow_cache[key]
        if e == 1:
            out = subs[i]
        else:
            prev = form_power(i, e - 1)
            out = {}
            for e1, c1 in prev.items():
                for e2, c2 in subs[i].items():
                    ee = tuple(a + b for a, b in zip(e1, e2))
                    v = fld.add(out.get(ee, 0), fld.mul(c1, c2))
                    if v:
                        out[ee] = v
                    else:
                        out.pop(ee, None)
        pow_cache[key] = out
        return out

    acc: Dict[Tuple[int, ...], int] = {}
    zero_exp = tuple([0] * w)
    for e, c in f.terms.items():
        term: Dict[Tuple[int, ...], int] = {zero_exp: c}
        dead = False
        for i, ei in enumerate(e):
            if not ei:
                continue
            factor = form_power(i, ei)
            if not factor:
                dead = True
                break
            new: Dict[Tuple[int, ...], int] = {}
            for e1, c1 in term.items():
                for e2, c2 in factor.items():
                    ee = tuple(a + b for a, b in zip(e1, e2))
                    v = fld.add(new.get(ee, 0), fld.mul(c1, c2))
                    if v:
                        new[ee] = v
                    else:
                        new.pop(ee, None)
            term = new
            if not term:
                dead = True
                break
        if dead:
            continue
        for ee, cc in term.items():
            v = fld.add(acc.get(ee, 0), cc)
            if v:
                acc[ee] = v
            else:
                acc.pop(ee, None)
    return HomogeneousPoly(fld, w, f.degree, acc)


def contains_flat(f: HomogeneousPoly, x: Flat) -> bool:
    if f.is_zero:
        raise ZeroPolynomial("the zero polynomial is not a hypersurface")
    return restrict_to_flat(f, x).is_zero


# ------------------------------------------------------------ factor scans


def _line_sample_batches(ext: Field, d: int, family: int, cand: np.ndarray):
    """Coordinate batches of d+1 distinct points per candidate line.

    family 0: covectors (1, b, g), cand rows = (b, g) element indices.
    family 1: covectors (0, 1, g), cand = g.
    family 2: the single covector (0, 0, 1); cand ignored.
    Yields (n_candidates, 3) uint16 arrays, one batch per sample point.
    """
    neg, mul = ext.neg_t, ext.mul_t
    cs = list(range(d))  # distinct parameter values c_j
    if family == 0:
        b, g = cand[:, 0].astype(np.int64), cand[:, 1].astype(np.int64)
        n = len(b)
        batch = np.empty((n, 3), dtype=np.uint16)
        batch[:, 0] = neg[g]
        batch[:, 1] = 0
        batch[:, 2] = 1
        yield batch
        for c in cs:
            batch = np.empty((n, 3), dtype=np.uint16)
            cg = mul[c, g] if c else np.zeros(n, dtype=np.int64)
            batch[:, 0] = neg[ext.add_t[b, cg]]
            batch[:, 1] = 1
            batch[:, 2] = c
            yield batch
    elif family == 1:
        g = cand.astype(np.int64)
        n = len(g)
        batch = np.zeros((n, 3), dtype=np.uint16)
        batch[:, 0] = 1
        yield batch
        for c in cs:
            batch = np.empty((n, 3), dtype=np.uint16)
            batch[:, 0] = c
            batch[:, 1] = neg[g]
            batch[:, 2] = 1
            yield batch
    else:
        batch = np.zeros((1, 3), dtype=np.uint16)
        batch[0, 0] = 1
        yield batch
        batch = np.zeros((1, 3), dtype=np.uint16)
        batch[0, 1] = 1
        yield batch
        for c in cs[1:]:
            batch = np.zeros((1, 3), dtype=np.uint16)
            batch[0, 0] = 1
            batch[0, 1] = c
            yield batch


def _divides_line(c_ext: HomogeneousPoly, covec: List[int]) -> bool:
    line = flat_from_rows(c_ext.field, null_space([covec], c_ext.field))
    return restrict_to_flat(c_ext, line).is_zero


def linear_factors_over(
    c: HomogeneousPoly, extension_degree: int
) -> List[HomogeneousPoly]:
    """All linear forms over the degree-e extension dividing the plane curve.

    Scan of the dual plane over the extension: a cheap d+1-point vanishing
    prefilter (exact for degree <= d forms on a projective line with more
    than d points), then a symbolic restriction check on the survivors.
    Returns distinct normalized forms over the extension field.
    """
    if c.nvars != 3:
        raise ArityMismatch("linear factor scan needs a plane curve")
    if c.is_zero:
        raise ZeroPolynomial("zero polynomial")
    if extension_degree not in (1, 2, 3):
        raise ArityMismatch("extension degree must be 1, 2, or 3")
    base = c.field
    tsize = base.size**extension_degree
    if tsize * tsize + tsize + 1 > DUAL_SCAN_BUDGET:
        raise SizeBudgetExceeded(
            f"dual plane over F_{tsize} exceeds the scan budget"
        )
    ext = field_create(base.p, base.k * extension_degree)
    c_ext = embed_poly(c, ext) if extension_degree > 1 else c
    d = c.degree
    t = ext.size

    found: List[List[int]] = []

    # family 0: (1, b, g)
    cand = np.empty((t * t, 2), dtype=np.int64)
    cand[:, 0] = np.repeat(np.arange(t), t)
    cand[:, 1] = np.tile(np.arange(t), t)
    alive = np.ones(t * t, dtype=bool)
    for batch in _line_sample_batches(ext, d, 0, cand):
        idx = np.nonzero(alive)[0]
        if idx.size == 0:
            break
        vals = eval_coords(c_ext, batch[idx])
        alive[idx[vals != 0]] = False
    for b, g in cand[alive]:
        covec = [1, int(b), int(g)]
        if _divides_line(c_ext, covec):
            found.append(covec)

    # family 1: (0, 1, g)
    cand1 = np.arange(t, dtype=np.int64)
    alive = np.ones(t, dtype=bool)
    for batch in _line_sample_batches(ext, d, 1, cand1):
        idx = np.nonzero(alive)[0]
        if idx.size == 0:
            break
        vals = eval_coords(c_ext, batch[idx])
        alive[idx[vals != 0]] = False
    for g in cand1[alive]:
        covec = [0, 1, int(g)]
        if _divides_line(c_ext, covec):
            found.append(covec)

    # family 2: (0, 0, 1)
    if _divides_line(c_ext, [0, 0, 1]):
        found.append([0, 0, 1])

    return [linear_form(ext, cv) for cv in found]


def classify_plane_cubic(c: HomogeneousPoly) -> PlaneCubicClass:
    if c.nvars != 3 or c.degree != 3:
        raise ArityMismatch("classification needs a plane cubic")
    if c.is_zero:
        raise ZeroPolynomial("zero polynomial")
    base_factors = linear_factors_over(c, 1)
    if base_factors:
        return PlaneCubicClass("Reducible", base_factors)
    cubic_factors = linear_factors_over(c, 3)
    if cubic_factors:
        if len(cubic_factors) != 3:
            raise TrichotomyViolated(
                f"irreducible cubic with {len(cubic_factors)} extension factors"
            )
        return PlaneCubicClass("IrreducibleNotAbsolutely", cubic_factors)
    return PlaneCubicClass("AbsolutelyIrreducible", [])
