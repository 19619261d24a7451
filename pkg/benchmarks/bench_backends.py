"""Compare the numba and pure-numpy kernel lanes on the hot paths.

Run:  python3 benchmarks/bench_backends.py [--q 3] [--reps 3]

Each benchmark is timed best-of-reps per lane after one warmup call;
variety caches are cleared between lanes so both do identical work.
The numbers to watch are the full-scan rows: the jitted lane should
win by an order of magnitude on large fields.
"""

import argparse
import os
import time

import numpy as np

os.environ.setdefault("HVLAB_BACKEND", "auto")

from hvlab import audit
from hvlab import constructions as cs
from hvlab import hermitian as hm
from hvlab import kernels
from hvlab import poly as hp
from hvlab.field import quadratic_field


def clear_caches():
    hm._variety_cache.cache_clear()
    audit._variety_coords.cache_clear()


def bench(fn, reps):
    fn()  # warmup: jit compilation, table builds
    best = None
    for _ in range(reps):
        clear_caches()
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def build_benchmarks(q):
    fld = quadratic_field(q)
    s = fld.size
    h = hm.hermitian_identity(fld, 4)
    total = kernels.num_points(s, 4)
    ids = np.arange(total, dtype=np.int64)
    hf = hm.hermitian_poly(h)
    exps, coeffs = hf.arrays()
    coords = kernels.decode_ids(ids, s, 4)
    f, _ = cs.edoukou_extremal(q, 2)

    def decode():
        kernels.decode_ids(ids, s, 4)

    def evaluate():
        kernels.eval_poly_many(coords, exps, coeffs, fld)

    def count():
        audit.count_intersection(f, h)

    def sample():
        audit.sample_hypersurfaces(q, 2, 25, 0)

    return [
        (f"decode_ids ({total} pts)", decode),
        (f"eval_poly_many ({total} pts)", evaluate),
        ("count_intersection (cold)", count),
        ("sample audit x25", sample),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=3, choices=(2, 3, 4, 5, 7))
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()

    lanes = ["numba", "numpy"] if kernels.HAVE_NUMBA else ["numpy"]
    results = {}
    for lane in lanes:
        os.environ["HVLAB_BACKEND"] = lane
        assert kernels.active_backend() == lane
        clear_caches()
        for name, fn in build_benchmarks(args.q):
            results.setdefault(name, {})[lane] = bench(fn, args.reps)
    os.environ["HVLAB_BACKEND"] = "auto"

    width = max(len(n) for n in results) + 2
    header = f"{'benchmark':<{width}}" + "".join(f"{l:>12}" for l in lanes)
    if len(lanes) == 2:
        header += f"{'speedup':>10}"
    print(f"q = {args.q}, best of {args.reps}")
    print(header)
    print("-" * len(header))
    for name, times in results.items():
        row = f"{name:<{width}}" + "".join(
            f"{times[l] * 1000:>10.1f}ms" for l in lanes
        )
        if len(lanes) == 2:
            row += f"{times['numpy'] / times['numba']:>9.1f}x"
        print(row)
    if len(lanes) == 1:
        print("numba unavailable: numpy lane only")


if __name__ == "__main__":
    main()
