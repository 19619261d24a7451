"""Deterministic builders for the named extremal configurations.

Every constructor verifies its claimed count by exhaustive enumeration
before returning; a certificate is never emitted unchecked. All searches
run in canonical enumeration order and take the first witness, so
constructions are reproducible without seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Tuple

import numpy as np

from . import hermitian as hm
from . import kernels
from . import poly as hp
from .errors import (
    ArityMismatch,
    BaseCurveSearchFailed,
    ConstructionNotFound,
    DegenerateForm,
    DimensionMismatch,
    InsufficientNonTangent,
    InsufficientPlanes,
    UsageError,
    VertexOnBase,
    ZeroPolynomial,
)
from .field import quadratic_field
from .geometry import (
    Flat,
    ProjPoint,
    enumerate_flats,
    flat_from_rows,
    hyperplane_from_covector,
    null_space,
)


@dataclass
class ExtremalCertificate:
    kind: str
    q: int
    d: int
    m: int
    claimed_count: int
    components: List[Flat] = dc_field(default_factory=list)


def count_on_variety(h: hm.HermitianForm, f: hp.HomogeneousPoly) -> int:
    """|V(f) meet variety(h)| by evaluation over the variety's points."""
    vals = hp.eval_ids(f, hm.variety_ids(h))
    return int((vals == 0).sum())


def _pencil_covectors(x: Flat) -> List[List[int]]:
    """Covectors of all hyperplanes through a codimension-2 flat, id order."""
    fld = x.field
    c = null_space([list(r) for r in x.basis], fld)
    s = fld.size
    combos = kernels.decode_ids(np.arange(s + 1, dtype=np.int64), s, 1)
    out = []
    for a, b in combos.tolist():
        out.append(
            [
                fld.add(fld.mul(a, u), fld.mul(b, v))
                for u, v in zip(c[0], c[1])
            ]
        )
    return out


def _check_d(d: int, q: int) -> None:
    if not 2 <= d <= q:
        raise UsageError(f"d must satisfy 2 <= d <= q, got d={d}, q={q}")


def _verified(
    kind: str,
    h: hm.HermitianForm,
    f: hp.HomogeneousPoly,
    q: int,
    d: int,
    claimed: int,
    components: List[Flat],
) -> Tuple[hp.HomogeneousPoly, ExtremalCertificate]:
    got = count_on_variety(h, f)
    if got != claimed:
        raise ConstructionNotFound(
            f"{kind} self-check failed: counted {got}, claimed {claimed}"
        )
    return f, ExtremalCertificate(kind, q, d, h.m, claimed, components)


# ---------------------------------------------------------------- edoukou


def _nondeg_plane_pencils(h: hm.HermitianForm):
    """Planes with a NonDegenerateCurve section plus their pencil tangency.

    Yields (plane, tangent_covectors, nontangent_covectors) in plane
    enumeration order.
    """
    fld = h.field
    q = fld.q
    for plane in enumerate_flats(4, 2, fld):
        if hm._section_count(h, plane) != q**3 + 1:
            continue
        tan, non = [], []
        for cov in _pencil_covectors(plane):
            if hm.tangency_point(h, cov) is None:
                non.append(cov)
            else:
                tan.append(cov)
        yield plane, tan, non


def edoukou_extremal(
    q: int, d: int, h: Optional[hm.HermitianForm] = None
) -> Tuple[hp.HomogeneousPoly, ExtremalCertificate]:
    """d non-tangent hyperplanes through a common plane cutting a curve.

    The count d(q^5+q^2)+q^3+1 is the conjectured maximum for degree-d
    hypersurface sections of the threefold.
    """
    _check_d(d, q)
    fld = quadratic_field(q)
    if h is None:
        h = hm.hermitian_identity(fld, 4)
    if hm.rank(h) != h.m + 1:
        raise DegenerateForm("the extremal configuration needs a non-degenerate form")
    best = 0
    for plane, _, non in _nondeg_plane_pencils(h):
        best = max(best, len(non))
        if len(non) < d:
            continue
        covs = non[:d]
        f = hp.poly_product([hp.linear_form(fld, c) for c in covs])
        claimed = d * (q**5 + q**2) + q**3 + 1
        comps = [plane] + [hyperplane_from_covector(fld, c) for c in covs]
        return _verified("EdoukouExtremal", h, f, q, d, claimed, comps)
    raise InsufficientNonTangent(
        f"no curve-section plane admits {d} non-tangent hyperplanes "
        f"(best pencil had {best})"
    )


# ---------------------------------------------------------------- sorensen


def sorensen_extremal(
    q: int, d: int, h3: Optional[hm.HermitianForm] = None
) -> Tuple[hp.HomogeneousPoly, ExtremalCertificate]:
    """d planes through a common secant line of the Hermitian surface.

    The tangent planes of the pencil realize the maximum
    d(q^3+q^2-q)+q+1 for degree-d surfaces in P^3.
    """
    _check_d(d, q)
    fld = quadratic_field(q)
    if h3 is None:
        h3 = hm.hermitian_identity(fld, 3)
    if hm.rank(h3) != h3.m + 1 or h3.m != 3:
        raise DegenerateForm("needs a non-degenerate form on P^3")
    best = 0
    for line in enumerate_flats(3, 1, fld):
        if hm._section_count(h3, line) != q + 1:
            continue
        tan = [c for c in _pencil_covectors(line) if hm.tangency_point(h3, c)]
        best = max(best, len(tan))
        if len(tan) < d:
            continue
        covs = tan[:d]
        f = hp.poly_product([hp.linear_form(fld, c) for c in covs])
        claimed = d * (q**3 + q**2 - q) + q + 1
        comps = [line] + [hyperplane_from_covector(fld, c) for c in covs]
        return _verified("SorensenExtremal", h3, f, q, d, claimed, comps)
    raise InsufficientPlanes(
        f"no secant line carries {d} tangent planes (best pencil had {best})"
    )


# -------------------------------------------------------------------- cones


def cone(p: ProjPoint, c: hp.HomogeneousPoly, plane: Flat) -> set:
    """Union of the lines joining p to the zeros of c on the plane.

    c is a ternary form read through the plane's parametrization. The
    result has exactly 1 + n*q^2 points for n base points, since distinct
    base points span distinct lines through p meeting only at p.
    """
    fld = plane.field
    if plane.dim != 2:
        raise DimensionMismatch("the base must live on a plane")
    if p.field != fld or p.m != plane.m:
        raise DimensionMismatch("vertex and plane live in different spaces")
    if c.nvars != 3:
        raise ArityMismatch("the base curve must be a ternary form")
    if c.is_zero:
        raise ZeroPolynomial("the base curve must be nonzero")
    if plane.contains_point(p):
        raise VertexOnBase(f"vertex {p} lies on the base plane")
    s = fld.size
    params = hp.zero_ids(c)
    combos = kernels.decode_ids(params, s, 2)
    base = kernels.combo_coords(
        plane.basis_array()[None, :, :], combos.astype(np.uint16), fld
    )[0]
    pts = {p}
    prow = np.array(p.coords, dtype=np.int64)
    for row in base.astype(np.int64):
        pts.add(ProjPoint(fld, row.tolist()))
        for y in range(1, s):
            mix = [
                fld.add(int(a), fld.mul(y, int(b))) for a, b in zip(prow, row)
            ]
            pts.add(ProjPoint(fld, mix))
    if len(pts) != 1 + len(params) * s:
        raise ConstructionNotFound("cone point count broke the line bijection")
    return pts


def rank3_surface(q: int) -> hm.HermitianForm:
    """The cone in P^3 over a plane Hermitian curve: diag(1,1,1,0)."""
    return hm.hermitian_diagonal(quadratic_field(q), 3, 3)


def degenerate_extremal(
    q: int, d: int
) -> Tuple[hp.HomogeneousPoly, ExtremalCertificate]:
    """Degree-d cone sharing the vertex of the rank-3 surface.

    The base is a union of d secant lines of the plane curve with
    pairwise disjoint meeting sets, so the surfaces share d(q+1) lines
    plus the vertex: d(q+1)q^2+1 points.
    """
    _check_d(d, q)
    fld = quadratic_field(q)
    surf = rank3_surface(q)
    curve = hm.hermitian_identity(fld, 2)
    v1_ids = hm.variety_ids(curve)
    s = fld.size
    total = kernels.num_points(s, 2)
    covs = kernels.decode_ids(np.arange(total, dtype=np.int64), s, 2)
    chosen: List[List[int]] = []
    used: set = set()
    for cov in covs.tolist():
        line = hp.linear_form(fld, cov)
        hits = v1_ids[hp.eval_ids(line, v1_ids) == 0]
        if len(hits) != q + 1:
            continue
        hset = {int(i) for i in hits}
        if hset & used:
            continue
        chosen.append(cov)
        used |= hset
        if len(chosen) == d:
            break
    if len(chosen) < d:
        raise BaseCurveSearchFailed(
            f"found only {len(chosen)} disjoint secant lines of {d} needed"
        )
    forms = [hp.linear_form(fld, cov + [0]) for cov in chosen]
    f = hp.poly_product(forms)
    claimed = d * (q + 1) * q**2 + 1
    comps = [hyperplane_from_covector(fld, cov + [0]) for cov in chosen]
    return _verified("DegenerateConeExtremal", surf, f, q, d, claimed, comps)


# ---------------------------------------------------------------- quadrics


def _first_plane_in_tangent_cone(h: hm.HermitianForm, p: ProjPoint) -> Flat:
    """A plane inside T_P avoiding P, from the tangent flat's basis rows."""
    fld = h.field
    tp = hm.tangent_hyperplane(h, p)
    rows = [list(r) for r in tp.basis]
    for omit in range(len(rows) - 1, -1, -1):
        sub = [rows[i] for i in range(len(rows)) if i != omit]
        plane = flat_from_rows(fld, sub)
        if not plane.contains_point(p):
            return plane
    raise ConstructionNotFound("every coordinate subplane of T_P contains P")


def quadric_of_type(
    kind: str, q: int, h: Optional[hm.HermitianForm] = None
) -> Tuple[hp.HomogeneousPoly, ExtremalCertificate]:
    """A split quadric of the requested type relative to the threefold."""
    if kind not in ("TypeI", "TypeII", "TypeIII"):
        raise UsageError(f"unknown quadric type {kind!r}")
    fld = quadratic_field(q)
    if h is None:
        h = hm.hermitian_identity(fld, 4)
    if hm.rank(h) != h.m + 1:
        raise DegenerateForm("quadric types are relative to a non-degenerate form")
    counts = {
        "TypeI": 2 * (q**5 + q**2) + q**3 + 1,
        "TypeII": 2 * q**5 + q**3 + q**2 + 1,
        "TypeIII": 2 * q**5 + 2 * q**2 + 1,
    }
    if kind in ("TypeI", "TypeIII"):
        for plane, tan, non in _nondeg_plane_pencils(h):
            if kind == "TypeI" and len(non) >= 2:
                covs = non[:2]
            elif kind == "TypeIII" and tan and non:
                covs = [tan[0], non[0]]
            else:
                continue
            return _finish_quadric(kind, h, q, plane, covs, counts[kind])
        raise ConstructionNotFound(f"no plane pencil yields {kind}")
    # TypeII: a plane spanned by two generators through a common point
    pid = int(hm.variety_ids(h)[0])
    p = ProjPoint(fld, kernels.decode_ids(
        np.array([pid], dtype=np.int64), fld.size, h.m)[0].tolist())
    base_plane = _first_plane_in_tangent_cone(h, p)
    bmp = hm.variety_bitmap(h)
    base_ids = [int(i) for i in base_plane.point_ids() if bmp[int(i)]]
    base = kernels.decode_ids(np.array(base_ids, dtype=np.int64), fld.size, h.m)
    for i in range(1, len(base)):
        plane = flat_from_rows(
            fld, [list(p.coords), base[0].tolist(), base[i].tolist()]
        )
        if plane.dim != 2:
            continue
        if hm._section_count(h, plane) != q**3 + q**2 + 1:
            continue
        non = [c for c in _pencil_covectors(plane) if hm.tangency_point(h, c) is None]
        if len(non) < 2:
            continue
        return _finish_quadric(kind, h, q, plane, non[:2], counts[kind])
    raise ConstructionNotFound("no two-generator plane yields TypeII")


def _finish_quadric(kind, h, q, plane, covs, claimed):
    fld = h.field
    f = hp.poly_product([hp.linear_form(fld, c) for c in covs])
    got = hm.classify_quadric(f, h)
    if got.tag != kind:
        raise ConstructionNotFound(f"built {got.tag} while seeking {kind}")
    comps = [plane] + [hyperplane_from_covector(fld, c) for c in covs]
    return _verified("Quadric" + kind, h, f, q, 2, claimed, comps)


# ------------------------------------------------------------------- serre


def serre_extremal(
    q: int, d: int, m: int
) -> Tuple[hp.HomogeneousPoly, ExtremalCertificate]:
    """d hyperplanes of P^m through a common codimension-2 flat."""
    fld = quadratic_field(q)
    s = fld.size
    if not 1 <= d <= s:
        raise UsageError(f"the hyperplane-union bound needs 1 <= d <= {s}")
    if not 2 <= m <= 4:
        raise UsageError("m must be between 2 and 4")
    axis = flat_from_rows(
        fld,
        [[1 if j == i else 0 for j in range(m + 1)] for i in range(m - 1)],
    )
    covs = _pencil_covectors(axis)[:d]
    f = hp.poly_product([hp.linear_form(fld, c) for c in covs])
    claimed = d * s ** (m - 1) + (s ** (m - 1) - 1) // (s - 1)
    got = len(hp.zero_ids(f))
    if got != claimed:
        raise ConstructionNotFound(
            f"hyperplane union counted {got}, claimed {claimed}"
        )
    comps = [axis] + [hyperplane_from_covector(fld, c) for c in covs]
    cert = ExtremalCertificate("SerreExtremal", q, d, m, claimed, comps)
    return f, cert
