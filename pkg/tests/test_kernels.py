"""Kernel correctness and lane equivalence."""

import numpy as np
import pytest

from hvlab import kernels
from hvlab.field import field_create


@pytest.fixture(params=["numpy"] + (["numba"] if kernels.HAVE_NUMBA else []))
def backend(request, monkeypatch):
    monkeypatch.setenv("HVLAB_BACKEND", request.param)
    return request.param


@pytest.mark.parametrize("s,m", [(4, 4), (9, 2), (4, 2), (9, 4)])
def test_id_codec_roundtrip(backend, s, m):
    total = kernels.num_points(s, m)
    ids = np.arange(total, dtype=np.int64)
    coords = kernels.decode_ids(ids, s, m)
    # normalized: first nonzero entry is 1
    firstnz = np.argmax(coords != 0, axis=1)
    assert (coords[np.arange(total), firstnz] == 1).all()
    # distinct and lexicographically sorted
    as_tuples = [tuple(r) for r in coords.tolist()]
    assert len(set(as_tuples)) == total
    assert as_tuples == sorted(as_tuples)
    back = kernels.encode_normalized(coords, s, m)
    assert (back == ids).all()


def test_encode_scales_rows(backend):
    f = field_create(3, 2)
    s, m = 9, 4
    total = kernels.num_points(s, m)
    ids = np.arange(total, dtype=np.int64)
    coords = kernels.decode_ids(ids, s, m)
    rng = np.random.default_rng(7)
    scal = rng.integers(1, s, size=total).astype(np.int64)
    scaled = f.mul_t[scal[:, None], coords.astype(np.int64)].astype(np.uint16)
    assert (kernels.encode_points(scaled, f, m) == ids).all()


def slow_eval(fld, row, exps, coeffs):
    acc = 0
    for e, c in zip(exps, coeffs):
        term = int(c)
        for x, ei in zip(row, e):
            term = fld.mul(term, fld.pow(int(x), int(ei)))
        acc = fld.add(acc, term)
    return acc


@pytest.mark.parametrize("p,k", [(2, 2), (3, 2)])
def test_eval_poly_many_matches_slow_eval(backend, p, k):
    fld = field_create(p, k)
    s = fld.size
    m = 2
    total = kernels.num_points(s, m)
    coords = kernels.decode_ids(np.arange(total, dtype=np.int64), s, m)
    # a haphazard degree-3 polynomial including terms that hit zero coords
    exps = np.array([[3, 0, 0], [1, 1, 1], [0, 2, 1], [0, 0, 3]], dtype=np.uint8)
    coeffs = np.array([1, 2, s - 1, 3 % s or 1], dtype=np.uint32)
    got = kernels.eval_poly_many(coords, exps, coeffs, fld)
    for i, row in enumerate(coords.tolist()):
        assert int(got[i]) == slow_eval(fld, row, exps.tolist(), coeffs.tolist())


def test_eval_zero_terms(backend):
    fld = field_create(2, 2)
    coords = kernels.decode_ids(np.arange(21, dtype=np.int64), 4, 2)
    out = kernels.eval_poly_many(
        coords, np.zeros((0, 3), dtype=np.uint8), np.zeros(0, dtype=np.uint32), fld
    )
    assert (out == 0).all()


def test_combo_coords_matches_loop(backend):
    fld = field_create(3, 2)
    rng = np.random.default_rng(3)
    bases = rng.integers(0, 9, size=(11, 2, 5)).astype(np.uint16)
    combos = kernels.decode_ids(np.arange(10, dtype=np.int64), 9, 1)
    got = kernels.combo_coords(bases, combos, fld)
    for l in range(11):
        for t in range(10):
            for c in range(5):
                acc = 0
                for k2 in range(2):
                    acc = fld.add(
                        acc, fld.mul(int(combos[t, k2]), int(bases[l, k2, c]))
                    )
                assert int(got[l, t, c]) == acc


def test_lane_equivalence_large_eval():
    if not kernels.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    fld = field_create(3, 2)
    coords = kernels.decode_ids(
        np.arange(kernels.num_points(9, 4), dtype=np.int64), 9, 4
    )
    exps = np.array(
        [[4, 0, 0, 0, 0], [0, 4, 0, 0, 0], [1, 1, 1, 1, 0], [0, 0, 2, 0, 2]],
        dtype=np.uint8,
    )
    coeffs = np.array([1, 5, 7, 8], dtype=np.uint32)
    import os

    os.environ["HVLAB_BACKEND"] = "numba"
    try:
        a = kernels.eval_poly_many(coords, exps, coeffs, fld)
        os.environ["HVLAB_BACKEND"] = "numpy"
        b = kernels.eval_poly_many(coords, exps, coeffs, fld)
    finally:
        os.environ.pop("HVLAB_BACKEND", None)
    assert (a == b).all()
