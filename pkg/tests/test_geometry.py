"""Projective geometry: enumeration counts, spans, incidence, books."""

import numpy as np
import pytest

from hvlab import geometry as geo
from hvlab.errors import ContainmentViolated, DimensionMismatch, EmptyInput
from hvlab.field import field_create

F4 = field_create(2, 2)
F9 = field_create(3, 2)


def test_point_normalization_and_equality():
    p = geo.ProjPoint(F4, [2, 2, 0])  # scales to (1, 1, 0)
    assert p.coords == (1, 1, 0)
    assert p == geo.ProjPoint(F4, [3, 3, 0])
    with pytest.raises(EmptyInput):
        geo.ProjPoint(F4, [0, 0, 0])


def test_enumerate_points_counts():
    assert len(list(geo.enumerate_points(4, F4))) == 341
    assert len(list(geo.enumerate_points(2, F4))) == 21
    assert len(list(geo.enumerate_points(0, F9))) == 1


def test_point_id_roundtrip():
    pts = list(geo.enumerate_points(2, F9))
    for i, p in enumerate(pts):
        assert p.point_id() == i
        assert geo.point_from_id(F9, 2, i) == p


def test_span_basics():
    p = geo.ProjPoint(F4, [1, 0, 0, 0, 0])
    q = geo.ProjPoint(F4, [0, 1, 0, 0, 0])
    assert geo.span([p, p]).dim == 0
    line = geo.span([p, q])
    assert line.dim == 1
    assert len(geo.flat_points(line)) == 5
    with pytest.raises(EmptyInput):
        geo.span([])


def test_span_three_points_plane():
    pts = [
        geo.ProjPoint(F4, [1, 0, 0, 0, 0]),
        geo.ProjPoint(F4, [0, 1, 2, 0, 0]),
        geo.ProjPoint(F4, [0, 0, 0, 1, 3]),
    ]
    plane = geo.span(pts)
    assert plane.dim == 2
    assert len(geo.flat_points(plane)) == 21


def test_flat_points_counts_and_membership():
    line = geo.span(
        [geo.ProjPoint(F4, [1, 2, 3, 0, 1]), geo.ProjPoint(F4, [0, 1, 1, 2, 0])]
    )
    pts = geo.flat_points(line)
    assert len(pts) == len(set(pts)) == 5
    for p in pts:
        assert geo.incidence(p, line)
    hyp = geo.flat_from_rows(
        F4, [[0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1]]
    )
    assert len(geo.flat_points(hyp)) == 85


def test_span_roundtrip_canonicity():
    flat = geo.flat_from_rows(F9, [[1, 5, 0, 3, 2], [0, 0, 1, 7, 1]])
    assert geo.span(geo.flat_points(flat)) == flat


def test_two_points_one_line():
    pts = list(geo.enumerate_points(2, F4))
    for a in range(0, 21, 5):
        for b in range(a + 1, 21, 3):
            l1 = geo.span([pts[a], pts[b]])
            assert l1.dim == 1
            assert geo.incidence(pts[a], l1) and geo.incidence(pts[b], l1)


def test_book_of_planes():
    line = geo.span(
        [geo.ProjPoint(F4, [1, 0, 0, 0, 0]), geo.ProjPoint(F4, [0, 1, 0, 0, 0])]
    )
    book = geo.book_of_planes(line)
    assert len(book) == 21  # q^4+q^2+1 at q=2
    assert len(set(book)) == 21
    for pl in book:
        assert pl.dim == 2 and pl.contains_flat(line)
    # pairwise intersections are exactly the line: each P^4 point off the
    # line lies in exactly one plane of the book
    line_pts = set(geo.flat_points(line))
    seen = {}
    for i, pl in enumerate(book):
        for p in geo.flat_points(pl):
            if p not in line_pts:
                assert p not in seen
                seen[p] = i
    assert len(seen) == 341 - 5  # the book covers P^4


def test_book_of_planes_q3_count():
    line = geo.span(
        [geo.ProjPoint(F9, [1, 0, 0, 0, 0]), geo.ProjPoint(F9, [0, 1, 0, 0, 0])]
    )
    assert len(geo.book_of_planes(line)) == 91


def test_book_of_planes_rejects_non_line():
    plane = geo.flat_from_rows(F4, [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0]])
    with pytest.raises(DimensionMismatch):
        geo.book_of_planes(plane)


def test_book_in_hyperplane():
    line = geo.span(
        [geo.ProjPoint(F4, [1, 0, 0, 0, 0]), geo.ProjPoint(F4, [0, 1, 0, 0, 0])]
    )
    hyp = geo.flat_from_rows(
        F4, [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0]]
    )
    book = geo.book_in_hyperplane(line, hyp)
    assert len(book) == len(set(book)) == 5  # q^2+1
    whole_book = set(geo.book_of_planes(line))
    for pl in book:
        assert pl in whole_book
        assert hyp.contains_flat(pl)
    other = geo.flat_from_rows(
        F4, [[0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1]]
    )
    with pytest.raises(ContainmentViolated):
        geo.book_in_hyperplane(line, other)


def test_book_in_hyperplane_q3_count():
    line = geo.span(
        [geo.ProjPoint(F9, [1, 0, 0, 0, 0]), geo.ProjPoint(F9, [0, 1, 0, 0, 0])]
    )
    hyp = geo.flat_from_rows(
        F9, [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0]]
    )
    assert len(geo.book_in_hyperplane(line, hyp)) == 10


def test_hyperplanes_through_plane():
    plane = geo.flat_from_rows(
        F4, [[1, 0, 0, 0, 2], [0, 1, 0, 0, 1], [0, 0, 1, 0, 0]]
    )
    hyps = geo.hyperplanes_through_plane(plane)
    assert len(hyps) == len(set(hyps)) == 5
    for h in hyps:
        assert h.dim == 3 and h.contains_flat(plane)
    # pairwise intersection is the plane again
    for i in range(len(hyps)):
        for j in range(i + 1, len(hyps)):
            both = [
                r
                for r in geo.flat_points(hyps[i])
                if geo.incidence(r, hyps[j])
            ]
            assert geo.span(both) == plane


def test_hyperplane_covector_roundtrip():
    f = F9
    covec = [1, 3, 0, 7, 2]
    hyp = geo.hyperplane_from_covector(f, covec)
    assert hyp.dim == 3
    assert geo.dual_covector(hyp) == covec
    for p in geo.flat_points(hyp)[:50]:
        acc = 0
        for c, x in zip(covec, p.coords):
            acc = f.add(acc, f.mul(c, x))
        assert acc == 0


def test_lines_through_point():
    p3 = geo.ProjPoint(F4, [1, 2, 0, 1])
    lines = list(geo.lines_through(p3, 3))
    assert len(lines) == len(set(lines)) == 21
    for l in lines:
        assert geo.incidence(p3, l)
    p4 = geo.ProjPoint(F4, [0, 1, 2, 0, 1])
    lines4 = list(geo.lines_through(p4, 4))
    assert len(lines4) == len(set(lines4)) == 85


def test_incidence_span_membership():
    p = geo.ProjPoint(F4, [1, 2, 3, 0, 0])
    q = geo.ProjPoint(F4, [0, 1, 0, 2, 1])
    assert geo.incidence(p, geo.span([p, q]))
    assert geo.incidence(q, geo.span([p, q]))


def line_count_by_pair_dedup(field, m):
    """Oracle: lines as deduplicated spans of all point pairs."""
    pts = list(geo.enumerate_points(m, field))
    seen = set()
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            seen.add(geo.span([pts[i], pts[j]]))
    return len(seen)


def test_enumerate_flats_against_pair_dedup_oracle():
    # P^2(F_4): 21 lines by duality; P^3(F_4): 357 lines
    assert line_count_by_pair_dedup(F4, 2) == 21
    lines = list(geo.enumerate_flats(2, 1, F4))
    assert len(lines) == len(set(lines)) == 21

    lines3 = list(geo.enumerate_flats(3, 1, F4))
    assert len(lines3) == len(set(lines3)) == 357
    assert line_count_by_pair_dedup(F4, 3) == 357


def test_enumerate_flats_gaussian_counts():
    assert geo.gaussian_binomial(5, 2, 4) == 5797
    assert geo.gaussian_binomial(5, 3, 4) == 5797
    assert geo.gaussian_binomial(5, 2, 9) == 605242
    assert len(list(geo.enumerate_flats(4, 3, F4))) == 341
    assert len(list(geo.enumerate_flats(4, 2, F4))) == 5797


def test_all_flat_bases_matches_iterator():
    arr = geo.all_flat_bases(2, 2, 4, 1)
    it = list(geo.enumerate_flats(4, 1, F4))
    assert arr.shape == (5797, 2, 5)
    for i in (0, 1, 17, 2000, 5796):
        assert geo.Flat(F4, arr[i].tolist()) == it[i]


def test_all_flats_are_rref_canonical():
    for fl in geo.enumerate_flats(3, 1, F4):
        rows, pivots = geo.rref([list(r) for r in fl.basis], F4)
        assert tuple(tuple(r) for r in rows) == fl.basis
        assert tuple(pivots) == fl.pivots
