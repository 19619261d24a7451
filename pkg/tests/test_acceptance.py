"""Acceptance gate: nine criteria, one test and one pass/fail line each.

Every criterion re-derives its numbers by enumeration through the public
API; nothing here trusts a construction certificate without recounting.
Budgets are wall-clock assertions, generous enough for a loaded machine
but tight enough to catch an accidental complexity regression.
"""

import io
import json
import time
from contextlib import redirect_stdout

import numpy as np

from hvlab import audit
from hvlab import cli
from hvlab import constructions as cs
from hvlab import hermitian as hm
from hvlab import poly as hp
from hvlab.field import quadratic_field

H2 = hm.hermitian_identity(quadratic_field(2), 4)
H3 = hm.hermitian_identity(quadratic_field(3), 4)


def form(q, m=4):
    return hm.hermitian_identity(quadratic_field(q), m)


def recount(f, h):
    return audit.count_intersection(f, h)


def draw(q, d, seed, m=4):
    fld = quadratic_field(q)
    exps = audit._monomial_basis(m + 1, d)
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(0,)))
    )
    while True:
        coeffs = rng.integers(0, fld.size, size=len(exps))
        if coeffs.any():
            break
    return hp.HomogeneousPoly(
        fld, m + 1, d, {e: int(c) for e, c in zip(exps, coeffs) if c}
    )


def run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.run(argv)
    return code, buf.getvalue()


def strip_timing(text):
    rep = json.loads(text)
    rep.pop("elapsed_ms", None)
    return json.dumps(rep)


def test_criterion_1_identity_suite_q2_exhaustive():
    t0 = time.monotonic()
    rep = audit.verify_identity_suite(2)
    elapsed = time.monotonic() - t0
    assert rep["mode"] == "exhaustive"
    assert rep["violations"] == []
    names = {r["name"] for r in rep["identities"]}
    assert {
        "variety_count_closed_form",
        "hyperplane_section_dichotomy",
        "tangent_hyperplane_bijection",
        "plane_section_trichotomy",
        "line_class_trichotomy",
        "generator_total",
        "generators_per_point",
        "pencil_curve_minimum",
        "tangent_line_books",
    } <= names
    assert elapsed < 60
    print(f"criterion 1 PASS: q=2 exhaustive identity suite in {elapsed:.1f}s")


def test_criterion_2_identity_suite_q3_exhaustive():
    t0 = time.monotonic()
    rep = audit.verify_identity_suite(3)
    elapsed = time.monotonic() - t0
    assert rep["mode"] == "exhaustive"
    assert rep["violations"] == []
    assert elapsed < 600
    print(f"criterion 2 PASS: q=3 exhaustive identity suite in {elapsed:.1f}s")


def test_criterion_3_quadric_types_and_sampling():
    expected = {
        2: {"TypeI": 81, "TypeII": 77, "TypeIII": 73},
        3: {"TypeI": 532, "TypeII": 523, "TypeIII": 505},
    }
    for q, kinds in expected.items():
        h = form(q)
        for kind, want in kinds.items():
            f, cert = cs.quadric_of_type(kind, q)
            assert cert.claimed_count == want
            assert recount(f, h) == want
    ceiling = {2: 81, 3: 532}
    for q in (2, 3):
        rep = audit.sample_hypersurfaces(q, 2, 1000, 0)
        assert rep.n == 1000
        assert rep.violations == []
        assert rep.max_count <= ceiling[q]
    print("criterion 3 PASS: quadric types exact at q=2,3; 2000 sampled quadrics under the ceiling")


def test_criterion_4_sorensen_attainment():
    assert recount(cs.sorensen_extremal(2, 2)[0], form(2, 3)) == 23
    assert recount(cs.sorensen_extremal(3, 3)[0], form(3, 3)) == 103
    rep = audit.sample_hypersurfaces(2, 2, 1000, 0, m=3)
    assert rep.n == 1000
    assert rep.violations == []
    assert rep.max_count <= 23
    print("criterion 4 PASS: surface attainment 23/103 exact; 1000 samples within the bound")


def test_criterion_5_degenerate_surface_bound():
    assert recount(cs.degenerate_extremal(2, 2)[0], cs.rank3_surface(2)) == 25
    assert recount(cs.degenerate_extremal(3, 3)[0], cs.rank3_surface(3)) == 109
    rep2 = audit.sample_hypersurfaces(2, 2, 500, 0, m=3, h=cs.rank3_surface(2))
    assert rep2.violations == [] and rep2.max_count <= 25
    rep3 = audit.sample_hypersurfaces(3, 2, 200, 0, m=3, h=cs.rank3_surface(3))
    assert rep3.violations == [] and rep3.max_count <= 73
    print("criterion 5 PASS: cone attainment 25/109 exact; sampled surfaces within d(q+1)q^2+1")


def test_criterion_6_main_attainment_and_campaign():
    f, cert = cs.edoukou_extremal(7, 3)
    assert cert.claimed_count == 50912
    h7 = form(7)

    hm._variety_cache.cache_clear()
    audit._variety_coords.cache_clear()
    t0 = time.monotonic()
    n1 = audit.count_intersection(f, h7, threads=1)
    single = time.monotonic() - t0

    hm._variety_cache.cache_clear()
    audit._variety_coords.cache_clear()
    t0 = time.monotonic()
    n8 = audit.count_intersection(f, h7, threads=8)
    eight = time.monotonic() - t0

    assert n1 == n8 == 50912
    assert single < 300
    assert eight < 60

    camp3 = audit.sample_hypersurfaces(3, 3, 10_000, 0)
    assert camp3.n == 10_000
    assert camp3.violations == []
    assert camp3.max_count <= 784
    assert all(row["ok"] for row in camp3.bounds)

    camp7 = audit.sample_hypersurfaces(7, 3, 1000, 0)
    assert camp7.n == 1000
    assert camp7.violations == []
    assert camp7.max_count <= 50912
    print(
        f"criterion 6 PASS: 50912 exact ({single:.1f}s single, {eight:.1f}s with 8 workers); "
        f"campaign max {camp3.max_count}/784 at q=3, {camp7.max_count}/50912 at q=7"
    )


def test_criterion_7_incidence_double_count():
    checked = 0
    for q, h in ((2, H2), (3, H3)):
        lhs, rhs = audit.incidence_double_count(hm.hermitian_poly(h), h)
        assert lhs == rhs
        built = [
            cs.edoukou_extremal(q, 2)[0],
            cs.quadric_of_type("TypeI", q)[0],
            cs.quadric_of_type("TypeII", q)[0],
            cs.quadric_of_type("TypeIII", q)[0],
            cs.serre_extremal(q, 2, 4)[0],
        ]
        if q == 3:
            built.append(cs.edoukou_extremal(3, 3)[0])
        for f in built:
            lhs, rhs = audit.incidence_double_count(f, h)
            assert lhs == rhs
        for seed in range(25):
            for d in range(2, q + 1):
                f = draw(q, d, seed)
                lhs, rhs = audit.incidence_double_count(f, h)
                assert lhs == rhs
                checked += 1
    print(f"criterion 7 PASS: lhs = rhs on varieties, extremals, and {checked} samples")


def test_criterion_8_plane_cubic_classification():
    for i in range(100):
        c = audit.conjugate_line_cubic(2, i)
        assert len(hp.zero_ids(c)) <= 1

    fld = quadratic_field(3)
    exps = audit._monomial_basis(3, 3)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(8)))
    accepted = 0
    for _ in range(400):
        if accepted == 100:
            break
        coeffs = rng.integers(0, fld.size, size=len(exps))
        if not coeffs.any():
            continue
        c = hp.HomogeneousPoly(
            fld, 3, 3, {e: int(v) for e, v in zip(exps, coeffs) if v}
        )
        if hp.linear_factors_over(c, 1):
            continue
        n = len(hp.zero_ids(c))
        if n < 2:
            # too few points to certify absolute irreducibility cheaply
            assert hp.classify_plane_cubic(c).tag != "AbsolutelyIrreducible"
            continue
        assert abs(n - 10) <= 6
        accepted += 1
    assert accepted == 100
    print("criterion 8 PASS: 100 conjugate-line cubics with <= 1 point; 100 irreducible cubics in the Weil window")


def test_criterion_9_determinism_across_reruns_and_threads(tmp_path):
    doc = tmp_path / "f.json"
    code, _ = run_cli(
        ["construct", "edoukou", "--q", "2", "--d", "2", "--out", str(doc)]
    )
    assert code == 0

    commands = [
        ["verify", "bounds", "--q", "2"],
        ["count", "--q", "2", "--in", str(doc)],
        ["audit", "--q", "2", "--in", str(doc)],
        ["sample", "--q", "2", "--d", "2", "--samples", "100", "--seed", "42"],
    ]
    for argv in commands:
        code1, out1 = run_cli(argv + ["--threads", "1"])
        code2, out2 = run_cli(argv + ["--threads", "4"])
        code3, out3 = run_cli(argv + ["--threads", "1"])
        assert code1 == code2 == code3 == 0
        assert strip_timing(out1) == strip_timing(out2) == strip_timing(out3)
    print("criterion 9 PASS: byte-identical reports across reruns and thread counts")
