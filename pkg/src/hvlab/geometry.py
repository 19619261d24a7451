"""Points and flats of P^m(F_s): enumeration, spans, incidence, books.

Flats are canonical: the basis is the reduced row-echelon form with pivot
entries 1 and pivot columns cleared, so equality and hashing are plain
tuple comparisons. Point ids follow the codec in kernels (lexicographic
coordinate order); enumeration order of flats is pivot-column combinations
in lexicographic order, then free entries as a row-major odometer.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from . import kernels
from .errors import (
    ContainmentViolated,
    DimensionMismatch,
    EmptyInput,
    FieldMismatch,
)
from .field import Field, field_create


class ProjPoint:
    """A point of P^m: normalized coordinates, first nonzero entry 1."""

    __slots__ = ("field", "coords")

    def __init__(self, field: Field, coords: Sequence[int]):
        coords = [int(c) for c in coords]
        j = next((i for i, c in enumerate(coords) if c), None)
        if j is None:
            raise EmptyInput("zero vector is not a projective point")
        if coords[j] != 1:
            inv = field.inv(coords[j])
            coords = [field.mul(inv, c) for c in coords]
        self.field = field
        self.coords = tuple(coords)

    @property
    def m(self) -> int:
        return len(self.coords) - 1

    def point_id(self) -> int:
        return int(
            kernels.encode_normalized(
                np.array([self.coords], dtype=np.uint16), self.field.size, self.m
            )[0]
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ProjPoint)
            and self.field == other.field
            and self.coords == other.coords
        )

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.k, self.coords))

    def __repr__(self) -> str:
        return f"ProjPoint{self.coords}"


def point_from_id(field: Field, m: int, pid: int) -> ProjPoint:
    row = kernels.decode_ids(np.array([pid], dtype=np.int64), field.size, m)[0]
    return ProjPoint(field, row.tolist())


class Flat:
    """A projective linear subspace with an RREF basis."""

    __slots__ = ("field", "basis", "pivots")

    def __init__(self, field: Field, basis: Sequence[Sequence[int]], pivots=None):
        self.field = field
        self.basis = tuple(tuple(int(c) for c in row) for row in basis)
        if pivots is None:
            pivots = tuple(
                next(i for i, c in enumerate(row) if c) for row in self.basis
            )
        self.pivots = tuple(pivots)

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    @property
    def m(self) -> int:
        return len(self.basis[0]) - 1

    def point_count(self) -> int:
        return kernels.num_points(self.field.size, self.dim)

    def basis_array(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.uint16)

    def point_ids(self) -> np.ndarray:
        """Ids of all points, in normalized-combination enumeration order."""
        s = self.field.size
        combos = kernels.decode_ids(
            np.arange(self.point_count(), dtype=np.int64), s, self.dim
        )
        rows = kernels.combo_coords(
            self.basis_array()[None, :, :], combos, self.field
        )[0]
        return kernels.encode_normalized(rows, s, self.m)

    def contains_point(self, p: ProjPoint) -> bool:
        return incidence(p, self)

    def contains_flat(self, other: "Flat") -> bool:
        return all(
            incidence(ProjPoint(self.field, row), self) for row in other.basis
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Flat)
            and self.field == other.field
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.k, self.basis))

    def __repr__(self) -> str:
        return f"Flat(dim={self.dim}, basis={self.basis})"


# ------------------------------------------------------------ linear algebra


def rref(rows: List[List[int]], fld: Field) -> Tuple[List[List[int]], List[int]]:
    """Reduced row echelon form over the field; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    nrows = len(rows)
    width = len(rows[0])
    pivots: List[int] = []
    r = 0
    for c in range(width):
        pr = next((i for i in range(r, nrows) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = fld.inv(rows[r][c])
        if inv != 1:
            rows[r] = [fld.mul(inv, x) for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [
                    fld.sub(x, fld.mul(f, y)) for x, y in zip(rows[i], rows[r])
                ]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows[:r], pivots


def null_space(rows: Sequence[Sequence[int]], fld: Field) -> List[List[int]]:
    """Basis of {v : rows @ v = 0}, one vector per free column."""
    red, pivots = rref([list(r) for r in rows], fld)
    width = len(rows[0])
    free = [c for c in range(width) if c not in pivots]
    out = []
    for f in free:
        v = [0] * width
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = fld.neg(red[i][f])
        out.append(v)
    return out


def flat_from_rows(field: Field, rows: Sequence[Sequence[int]]) -> Flat:
    red, pivots = rref([list(r) for r in rows], field)
    if not red:
        raise EmptyInput("rows span nothing")
    return Flat(field, red, pivots)


# ---------------------------------------------------------------- operations


def enumerate_points(m: int, field: Field) -> Iterator[ProjPoint]:
    """All points of P^m in lexicographic coordinate order."""
    total = kernels.num_points(field.size, m)
    chunk = 1 << 14
    for lo in range(0, total, chunk):
        ids = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        rows = kernels.decode_ids(ids, field.size, m)
        for row in rows:
            yield ProjPoint(field, row.tolist())


def span(points: Sequence[ProjPoint]) -> Flat:
    if not points:
        raise EmptyInput("span of no points")
    field = points[0].field
    width = len(points[0].coords)
    for p in points:
        if p.field != field:
            raise FieldMismatch("span across different fields")
        if len(p.coords) != width:
            raise DimensionMismatch("span across different ambient spaces")
    return flat_from_rows(field, [list(p.coords) for p in points])


def flat_points(flat: Flat) -> List[ProjPoint]:
    s = flat.field.size
    combos = kernels.decode_ids(
        np.arange(flat.point_count(), dtype=np.int64), s, flat.dim
    )
    rows = kernels.combo_coords(
        flat.basis_array()[None, :, :], combos, flat.field
    )[0]
    return [ProjPoint(flat.field, row.tolist()) for row in rows]


def incidence(p: ProjPoint, flat: Flat) -> bool:
    fld = flat.field
    v = list(p.coords)
    for row, pc in zip(flat.basis, flat.pivots):
        c = v[pc]
        if c:
            v = [fld.sub(x, fld.mul(c, y)) for x, y in zip(v, row)]
    return not any(v)


def _complement_columns(flat: Flat) -> List[int]:
    return [c for c in range(flat.m + 1) if c not in flat.pivots]


def book_of_planes(line: Flat) -> List[Flat]:
    """All planes of P^4 containing the line; |B(l)| = s^2+s+1."""
    if line.dim != 1 or line.m != 4:
        raise DimensionMismatch("book_of_planes needs a line in P^4")
    comp = _complement_columns(line)
    unit = [[1 if c == col else 0 for c in range(5)] for col in comp]
    skew = Flat(line.field, unit, comp)
    out = []
    for w in flat_points(skew):
        out.append(flat_from_rows(line.field, list(line.basis) + [list(w.coords)]))
    return out


def _extend_inside(sub: Flat, sup: Flat) -> List[List[int]]:
    """Rows of sup completing sub's basis to a basis of sup."""
    fld = sub.field
    rows = [list(r) for r in sub.basis]
    extra = []
    for cand in sup.basis:
        trial = rows + [list(cand)]
        red, pivots = rref(trial, fld)
        if len(red) > len(rows):
            rows = red
            extra.append(list(cand))
    return extra


def book_in_hyperplane(line: Flat, hyperplane: Flat) -> List[Flat]:
    """Planes between the line and the hyperplane; cardinality s+1."""
    if line.dim != 1 or hyperplane.dim != line.m - 1:
        raise DimensionMismatch("need a line and a hyperplane")
    if not hyperplane.contains_flat(line):
        raise ContainmentViolated("line is not inside the hyperplane")
    fld = line.field
    w = _extend_inside(line, hyperplane)
    combos = kernels.decode_ids(
        np.arange(fld.size + 1, dtype=np.int64), fld.size, 1
    )
    out = []
    for a, b in combos:
        vec = [
            fld.add(fld.mul(int(a), x), fld.mul(int(b), y))
            for x, y in zip(w[0], w[1])
        ]
        out.append(flat_from_rows(fld, list(line.basis) + [vec]))
    return out


def hyperplanes_through_plane(plane: Flat) -> List[Flat]:
    """All hyperplanes of P^4 containing the plane; cardinality s+1."""
    if plane.dim != 2 or plane.m != 4:
        raise DimensionMismatch("hyperplanes_through_plane needs a plane in P^4")
    fld = plane.field
    cv = null_space(plane.basis, fld)
    combos = kernels.decode_ids(
        np.arange(fld.size + 1, dtype=np.int64), fld.size, 1
    )
    out = []
    for a, b in combos:
        covec = [
            fld.add(fld.mul(int(a), x), fld.mul(int(b), y))
            for x, y in zip(cv[0], cv[1])
        ]
        out.append(hyperplane_from_covector(fld, covec))
    return out


def hyperplane_from_covector(field: Field, covec: Sequence[int]) -> Flat:
    """The hyperplane {x : sum covec_i x_i = 0}."""
    rows = null_space([list(covec)], field)
    return flat_from_rows(field, rows)


def dual_covector(hyperplane: Flat) -> List[int]:
    """The normalized covector whose kernel is the hyperplane."""
    if hyperplane.dim != hyperplane.m - 1:
        raise DimensionMismatch("dual_covector needs a hyperplane")
    vecs = null_space(hyperplane.basis, hyperplane.field)
    v = vecs[0]
    fld = hyperplane.field
    j = next(i for i, c in enumerate(v) if c)
    inv = fld.inv(v[j])
    return [fld.mul(inv, c) for c in v]


def lines_through(p: ProjPoint, m: int) -> Iterator[Flat]:
    """All lines through the point, one per point of an avoiding hyperplane."""
    fld = p.field
    j = next(i for i, c in enumerate(p.coords) if c)
    comp_cols = [c for c in range(m + 1) if c != j]
    unit = [[1 if c == col else 0 for c in range(m + 1)] for col in comp_cols]
    hyp = Flat(fld, unit, comp_cols)
    for w in flat_points(hyp):
        yield flat_from_rows(fld, [list(p.coords), list(w.coords)])


def _flat_basis_iter(m: int, dim: int, s: int):
    width = m + 1
    r = dim + 1
    for pivots in itertools.combinations(range(width), r):
        pivset = set(pivots)
        free = [
            (a, c)
            for a in range(r)
            for c in range(pivots[a] + 1, width)
            if c not in pivset
        ]
        base = [[0] * width for _ in range(r)]
        for a, pc in enumerate(pivots):
            base[a][pc] = 1
        if not free:
            yield [row[:] for row in base], pivots
            continue
        for vals in itertools.product(range(s), repeat=len(free)):
            rows = [row[:] for row in base]
            for (a, c), v in zip(free, vals):
                rows[a][c] = v
            yield rows, pivots


def enumerate_flats(m: int, dim: int, field: Field) -> Iterator[Flat]:
    """All flats of the given dimension, deterministic order."""
    for rows, pivots in _flat_basis_iter(m, dim, field.size):
        yield Flat(field, rows, pivots)


@lru_cache(maxsize=None)
def all_flat_bases(p: int, k: int, m: int, dim: int) -> np.ndarray:
    """Every flat's RREF basis stacked: (count, dim+1, m+1) uint16 array.

    Same order as enumerate_flats, built block-wise per pivot combination
    with the free entries read off as base-s digits.
    """
    field = field_create(p, k)
    s = field.size
    width = m + 1
    r = dim + 1
    blocks = []
    for pivots in itertools.combinations(range(width), r):
        pivset = set(pivots)
        free = [
            (a, c)
            for a in range(r)
            for c in range(pivots[a] + 1, width)
            if c not in pivset
        ]
        nf = len(free)
        count = s**nf
        block = np.zeros((count, r, width), dtype=np.uint16)
        for a, pc in enumerate(pivots):
            block[:, a, pc] = 1
        idx = np.arange(count, dtype=np.int64)
        for i, (a, c) in enumerate(free):
            block[:, a, c] = (idx // s ** (nf - 1 - i)) % s
        blocks.append(block)
    return np.concatenate(blocks, axis=0)


def gaussian_binomial(n: int, r: int, s: int) -> int:
    num = 1
    den = 1
    for i in range(r):
        num *= s ** (n - i) - 1
        den *= s ** (i + 1) - 1
    return num // den
