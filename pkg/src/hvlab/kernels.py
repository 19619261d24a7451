"""Flat-array enumeration kernels with two interchangeable lanes.

Every hot loop in the package funnels through here: batched polynomial
evaluation, field matrix products for flat point tables, and the O(1)
point-id codec. Each kernel has a numba-jitted lane and a pure-numpy lane;
HVLAB_BACKEND picks one (auto / numba / numpy, default auto = numba when
importable). Both lanes are exact integer arithmetic: the numpy evaluation
lane works in float64 log-space, safe because every log-sum stays far
below 2^53.

Point ids: normalized points of P^m(F_s) in lexicographic coordinate
order. The group with first nonzero at position j occupies the id range
[grp_lo[j], grp_lo[j-1]) with grp_lo[j] = (s^{m-j}-1)/(s-1), and within a
group the free trailing coordinates read as a big-endian base-s integer.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import SizeBudgetExceeded

try:
    if os.environ.get("HVLAB_BACKEND", "auto") == "numpy":
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


def active_backend() -> str:
    mode = os.environ.get("HVLAB_BACKEND", "auto")
    if mode == "numpy":
        return "numpy"
    if mode == "numba":
        if not HAVE_NUMBA:
            raise SizeBudgetExceeded("HVLAB_BACKEND=numba but numba is unavailable")
        return "numba"
    return "numba" if HAVE_NUMBA else "numpy"


def _use_numba() -> bool:
    return active_backend() == "numba"


def id_group_bounds(s: int, m: int) -> np.ndarray:
    """grp_lo[j] for j = 0..m: first id whose leading nonzero is at j."""
    return np.array(
        [(s ** (m - j) - 1) // (s - 1) for j in range(m + 1)], dtype=np.int64
    )


def id_pow_s(s: int, m: int) -> np.ndarray:
    """pow_s[i] = s^{m-i}: weight of coordinate i in the local index."""
    return np.array([s ** (m - i) for i in range(m + 1)], dtype=np.int64)


def num_points(s: int, m: int) -> int:
    return (s ** (m + 1) - 1) // (s - 1)


def _dense(fld):
    if fld.add_t is None or fld.mul_t is None:
        raise SizeBudgetExceeded(
            f"field of size {fld.size} has no dense tables for kernel use"
        )
    return (
        fld.add_t.astype(np.uint32),
        fld.mul_t.astype(np.uint32),
        fld.inv_t.astype(np.uint32),
        fld.log_t.astype(np.int64),
        fld.exp_t.astype(np.uint32),
    )


# ---------------------------------------------------------------- decode


@njit(cache=True, nogil=True)
def _nb_decode(ids, grp_lo, s, m, out):
    for r in range(ids.shape[0]):
        pid = ids[r]
        j = 0
        for jj in range(m + 1):
            if pid >= grp_lo[jj]:
                j = jj
                break
        local = pid - grp_lo[j]
        out[r, j] = 1
        for i in range(m, j, -1):
            out[r, i] = local % s
            local //= s


def _np_decode(ids, grp_lo, s, m, out):
    n = ids.shape[0]
    j = np.full(n, 0, dtype=np.int64)
    found = np.zeros(n, dtype=bool)
    for jj in range(m + 1):
        sel = (~found) & (ids >= grp_lo[jj])
        j[sel] = jj
        found |= sel
    local = ids - grp_lo[j]
    cols = np.arange(m + 1)
    for i in range(m, -1, -1):
        digit = local % s
        take = cols[i] > j
        out[take, i] = digit[take]
        local = np.where(take, local // s, local)
    out[np.arange(n), j] = 1


def decode_ids(ids: np.ndarray, s: int, m: int) -> np.ndarray:
    """Point ids -> normalized coordinate rows, shape (N, m+1) uint16."""
    ids = np.ascontiguousarray(ids, dtype=np.int64)
    out = np.zeros((ids.shape[0], m + 1), dtype=np.uint16)
    grp_lo = id_group_bounds(s, m)
    if _use_numba():
        _nb_decode(ids, grp_lo, s, m, out)
    else:
        _np_decode(ids, grp_lo, s, m, out)
    return out


# ---------------------------------------------------------------- encode


@njit(cache=True, nogil=True)
def _nb_encode_norm(coords, grp_lo, pow_s, out):
    n, w = coords.shape
    for r in range(n):
        j = 0
        for i in range(w):
            if coords[r, i] != 0:
                j = i
                break
        local = 0
        for i in range(j + 1, w):
            local += coords[r, i] * pow_s[i]
        out[r] = grp_lo[j] + local


def _np_encode_norm(coords, grp_lo, pow_s, out):
    c = coords.astype(np.int64)
    firstnz = np.argmax(c != 0, axis=1)
    cols = np.arange(c.shape[1])[None, :]
    local = np.where(cols > firstnz[:, None], c * pow_s[None, :], 0).sum(axis=1)
    out[:] = grp_lo[firstnz] + local


def encode_normalized(coords: np.ndarray, s: int, m: int) -> np.ndarray:
    """Normalized coordinate rows -> point ids (no scaling performed)."""
    coords = np.ascontiguousarray(coords, dtype=np.uint16)
    out = np.empty(coords.shape[0], dtype=np.int64)
    grp_lo = id_group_bounds(s, m)
    pow_s = id_pow_s(s, m)
    if _use_numba():
        _nb_encode_norm(coords, grp_lo, pow_s, out)
    else:
        _np_encode_norm(coords, grp_lo, pow_s, out)
    return out


@njit(cache=True, nogil=True)
def _nb_encode(coords, grp_lo, pow_s, mul_t, inv_t, out):
    n, w = coords.shape
    for r in range(n):
        j = 0
        for i in range(w):
            if coords[r, i] != 0:
                j = i
                break
        scale = inv_t[coords[r, j]]
        local = 0
        for i in range(j + 1, w):
            local += mul_t[scale, coords[r, i]] * pow_s[i]
        out[r] = grp_lo[j] + local


def _np_encode(coords, grp_lo, pow_s, mul_t, inv_t, out):
    c = coords.astype(np.int64)
    firstnz = np.argmax(c != 0, axis=1)
    rows = np.arange(c.shape[0])
    scale = inv_t[c[rows, firstnz]].astype(np.int64)
    scaled = mul_t[scale[:, None], c]
    cols = np.arange(c.shape[1])[None, :]
    local = np.where(
        cols > firstnz[:, None], scaled.astype(np.int64) * pow_s[None, :], 0
    ).sum(axis=1)
    out[:] = grp_lo[firstnz] + local


def encode_points(coords: np.ndarray, fld, m: int) -> np.ndarray:
    """Arbitrary nonzero coordinate rows -> point ids, scaling rows first."""
    add_t, mul_t, inv_t, _, _ = _dense(fld)
    coords = np.ascontiguousarray(coords, dtype=np.uint16)
    out = np.empty(coords.shape[0], dtype=np.int64)
    grp_lo = id_group_bounds(fld.size, m)
    pow_s = id_pow_s(fld.size, m)
    if _use_numba():
        _nb_encode(coords, grp_lo, pow_s, mul_t, inv_t, out)
    else:
        _np_encode(coords, grp_lo, pow_s, mul_t, inv_t, out)
    return out


# ------------------------------------------------------------ evaluation


@njit(cache=True, nogil=True)
def _nb_eval(coords, exps, logc, log_t, exp_t, add_t, order, out):
    n = coords.shape[0]
    nt, nv = exps.shape
    for r in range(n):
        acc = np.uint32(0)
        for t in range(nt):
            lg = logc[t]
            dead = False
            for v in range(nv):
                e = exps[t, v]
                if e != 0:
                    x = coords[r, v]
                    if x == 0:
                        dead = True
                        break
                    lg += e * log_t[x]
            if not dead:
                acc = add_t[acc, exp_t[lg % order]]
        out[r] = acc


def _np_eval(coords, exps, logc, log_t, exp_t, add_t, order, out):
    c = coords.astype(np.int64)
    ex = exps.astype(np.float64)
    logx = log_t[c].astype(np.float64)
    # every log-sum < d * 2^20 + 2^20, exact in float64
    sums = logx @ ex.T + logc.astype(np.float64)[None, :]
    dead = ((c == 0).astype(np.float64) @ ex.T) > 0.5
    idx = np.mod(sums.astype(np.int64), order)
    vals = exp_t[idx]
    vals[dead] = 0
    acc = np.zeros(c.shape[0], dtype=np.uint32)
    for t in range(exps.shape[0]):
        acc = add_t[acc, vals[:, t]]
    out[:] = acc


def eval_poly_many(coords: np.ndarray, exps: np.ndarray, coeffs: np.ndarray, fld) -> np.ndarray:
    """Evaluate a sparse polynomial at every coordinate row.

    exps: (T, nvars) exponent matrix; coeffs: (T,) nonzero element indices.
    Returns field element indices, shape (N,).
    """
    add_t, _, _, log_t, exp_t = _dense(fld)
    coords = np.ascontiguousarray(coords, dtype=np.uint16)
    exps = np.ascontiguousarray(exps, dtype=np.uint8)
    if exps.shape[0] == 0:
        return np.zeros(coords.shape[0], dtype=np.uint32)
    logc = log_t[np.asarray(coeffs, dtype=np.int64)]
    order = fld.size - 1
    out = np.empty(coords.shape[0], dtype=np.uint32)
    if _use_numba():
        _nb_eval(coords, exps, logc, log_t, exp_t, add_t, order, out)
    else:
        _np_eval(coords, exps, logc, log_t, exp_t, add_t, order, out)
    return out


# ---------------------------------------------------------- flat tables


@njit(cache=True, nogil=True)
def _nb_combo(bases, combos, mul_t, add_t, out):
    nl, nk, nc = bases.shape
    nt = combos.shape[0]
    for l in range(nl):
        for t in range(nt):
            for c in range(nc):
                acc = np.uint32(0)
                for k in range(nk):
                    acc = add_t[acc, mul_t[combos[t, k], bases[l, k, c]]]
                out[l, t, c] = acc


def _np_combo(bases, combos, mul_t, add_t, out):
    nl, nk, nc = bases.shape
    nt = combos.shape[0]
    acc = np.zeros((nl, nt, nc), dtype=np.uint32)
    for k in range(nk):
        term = mul_t[combos[None, :, k, None], bases[:, None, k, :]]
        acc = add_t[acc, term]
    out[:] = acc


def combo_coords(bases: np.ndarray, combos: np.ndarray, fld) -> np.ndarray:
    """Field product combos @ bases, batched over the first axis.

    bases: (L, K, C) basis rows per flat; combos: (T, K) coefficient rows.
    Returns (L, T, C) uint16 coordinate rows.
    """
    add_t, mul_t, _, _, _ = _dense(fld)
    bases = np.ascontiguousarray(bases, dtype=np.uint16)
    combos = np.ascontiguousarray(combos, dtype=np.uint16)
    out = np.empty((bases.shape[0], combos.shape[0], bases.shape[2]), dtype=np.uint16)
    if _use_numba():
        _nb_combo(bases, combos, mul_t, add_t, out)
    else:
        _np_combo(bases, combos, mul_t, add_t, out)
    return out
