"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL ...`` line (visible with or
without ``-s``) before asserting, and checks its runtime budget.
"""

import math
import time

import numpy as np
import pytest

from stolinv.defect import build_defect_series
from stolinv.engine import (
    Laurent,
    apply_bindings,
    compare_fixture,
    compute_P,
    eliminate_r,
    eliminate_t,
    extract_C,
    refute_candidate,
    run_elimination_endgame,
    symmetric_crosscheck,
    truncation_consistency,
)
from stolinv.exact import rational
from stolinv.families import (
    CASES,
    random_non_member,
    residual_at,
    verify_family,
)
from stolinv.fixtures import load_fixtures
from stolinv.means import GINI, STOLARSKY, gini, stolarsky, stolarsky_eval_truncated
from stolinv.multipoly import MultiPoly, parse_poly
from stolinv.resultant import nonzero_resultant_certificate
from stolinv.series_ext import RadicalExtension, TruncSeries, series_exp_nilpotent, series_log_unit

FX = load_fixtures()


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, msg):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {msg}")
        assert ok, msg
    return emit


def _elimination(F):
    bt = eliminate_t(F[4])
    c6 = apply_bindings(F[6], [bt])
    br = eliminate_r(c6.num)
    return bt, c6, br, compute_P({n: F[n] for n in (8, 10, 12)}, [bt, br])


@pytest.fixture(scope="module")
def endgame(F13):
    _, _, _, P = _elimination(F13)
    start = time.perf_counter()
    end = run_elimination_endgame(*(P[n].split().core for n in (8, 10, 12)))
    return end, time.perf_counter() - start


def test_criterion_1_C4(verdict):
    start = time.perf_counter()
    F = build_defect_series(5)
    split = extract_C(F, 4)
    printed = parse_poly("-1/45*v*s - 4/135*w*v^2 + 1/45*w*t - 1/45*w*r", F[4].vars)
    cmp = compare_fixture(Laurent.make(F[4]), FX["C4"])
    elapsed = time.perf_counter() - start
    ok = F[4] == printed and cmp.status == "matched" and split.prefactor == rational(1, 135) and elapsed < 1
    verdict(1, ok, f"C4 = {split.prefactor} * ({split.core}) [{elapsed:.2f}s < 1s]")


def test_criterion_2_C6_to_P12(verdict):
    start = time.perf_counter()
    F = build_defect_series(13)
    bt, c6, br, P = _elimination(F)
    s6 = c6.split()
    results = {"C6": compare_fixture(c6, FX["C6"])}
    for n in (8, 10, 12):
        results[f"C{n}"] = compare_fixture(P[n], FX[f"C{n}"])
    elapsed = time.perf_counter() - start
    sizes = {n: len(P[n].split().core) for n in (8, 10, 12)}

    # the printed C2 line differs from the derived C2; its displayed consequence must agree
    raw2 = build_defect_series(3, "raw")[2]
    c2_line_differs = raw2 != FX["C2"].poly("printed")
    c2_condition = raw2 * 3 == FX["C2"].poly("condition")
    # the double sign in C10 sits on w^6*v^12; the engine value, in the printed orientation, decides it
    double_sign = P[10].split().core.coeff_of(w=6, v=12) * results["C10"].orientation

    ok = (
        s6.prefactor == rational(2, 8505) and s6.monomial == (-1, 0, 0, 0, 0) and len(s6.core) == 7
        and results["C6"].status == "matched"
        and results["C8"].status == "matched" and sizes[8] == 15
        and results["C10"].status == "matched_with_declared_typo" and sizes[10] == 28
        and results["C12"].status == "matched" and sizes[12] == len(FX["C12"].poly("core"))
        and c2_line_differs and c2_condition and double_sign > 0
        and elapsed < 300
    )
    flags = "; ".join(f"{k} {v.status}" for k, v in results.items())
    verdict(2, ok, f"{flags}; terms P8/P10/P12 = {sizes[8]}/{sizes[10]}/{sizes[12]}; "
                   f"C2 line flagged, C10 double sign resolved '+' [{elapsed:.1f}s < 300s]")


def test_criterion_3_R8_10(verdict, endgame):
    end, elapsed = endgame
    R = end.R8_10
    printed = FX["R8_10"].poly("core")
    display = FX["P8_10"].poly("core")
    vars3 = ("w", "v", "s")
    mismatched, conflicts = [], []
    for exps, coeff in printed.items():
        w_e, v_e, _ = exps
        ours = R.core.coeff_of(w=w_e, v=v_e)
        if ours == coeff:
            continue
        if ours == -coeff and display.coeff_of(z=w_e) == ours:
            conflicts.append(f"w^{w_e}*v^{v_e}")
        else:
            mismatched.append(exps)
    ok = (
        R.content == int(FX["R8_10"].rational("prefactor")) == 28242953648100000000
        and R.monomial == (24, 24, 0)
        and R.linear == {"v-w": 8, "v+w": 8}
        and len(printed) == len(R.core) == 17
        and R.core.coeff_of(v=32) == 395726752304 and R.core.coeff_of(w=32) == 912066926976343384
        and not mismatched and conflicts == ["w^24*v^8"]
        and R.core.vars == vars3 and elapsed < 600
    )
    verdict(3, ok, f"content {R.content}, w^24*v^24*(v-w)^8*(v+w)^8, 17/17 coefficients "
                   f"(sign of {', '.join(conflicts)} taken from the dehomogenised display) [{elapsed:.1f}s < 600s]")


def test_criterion_4_Q_certificate(verdict, endgame):
    end, _ = endgame
    start = time.perf_counter()
    P8_10, P8_12 = end.P8_10, end.P8_12
    cert = nonzero_resultant_certificate(P8_10, P8_12, "z")
    elapsed = time.perf_counter() - start
    ok = (P8_10.degree("z") == 32 and P8_12.degree("z") == 44 and cert.kind == "modular"
          and cert.nonzero and end.certificate.nonzero and elapsed < 30)
    verdict(4, ok, f"deg 32 / deg 44 coprime, residue {cert.residue} mod {cert.prime} [{elapsed:.2f}s < 30s]")


def test_criterion_5_refutation(verdict):
    start = time.perf_counter()
    ref = refute_candidate("v=w")
    elapsed = time.perf_counter() - start
    ok = ref.value == rational(-12352, 5775) == FX["refutation"].rational("value") and elapsed < 60
    verdict(5, ok, f"order-10 coefficient {ref.value} in Q(sqrt 13) [{elapsed:.2f}s < 60s]")


def _mixed_partial(f, i, j, h):
    total = 0.0
    for a in range(i + 1):
        for b in range(j + 1):
            c = (-1) ** (a + b) * math.comb(i, a) * math.comb(j, b)
            total += c * f(1 + (i / 2 - a) * h, 1 + (j / 2 - b) * h)
    return total / h ** (i + j)


def _richardson(f, i, j, h=1e-2):
    return (4 * _mixed_partial(f, i, j, h / 2) - _mixed_partial(f, i, j, h)) / 3


def test_criterion_6_truncation(verdict):
    bad = {pair: truncation_consistency(*pair) for pair in ((5, 9), (7, 13), (9, 13))}
    worst = 0.0
    for p, q in ((2, 1), (3, -1), (1.5, 1.5), (0.5, 0), (-2, 0.75)):
        m = stolarsky(p, q)
        for i in range(1, 4):
            for j in range(1, 5 - i):
                a = _richardson(lambda x, y: m(x, y), i, j)
                b = _richardson(lambda x, y: stolarsky_eval_truncated(6, m, x, y), i, j)
                worst = max(worst, abs(a - b))
    ok = not any(bad.values()) and worst <= 1e-5
    verdict(6, ok, f"F_k1 == F_k2 through order k1-1 for (5,9), (7,13), (9,13); "
                   f"finite-difference max gap {worst:.2e} <= 1e-5")


def test_criterion_7_families(verdict):
    start = time.perf_counter()
    checks = [verify_family(th, cid, samples=10_000, seed=0) for th, cid in CASES]
    worst_member = max(c.max_residual for c in checks)
    root = math.sqrt(13)
    refuted = [(7, 5, 1, -1, 3 + root, 3 - root), (1, -1, 7, 5, 3 + root, 3 - root)]
    refuted_res = [residual_at(STOLARSKY, t) for t in refuted]
    rng = np.random.default_rng(2024)
    controls = [residual_at(mean, random_non_member(mean, rng)) for mean in (STOLARSKY, GINI) for _ in range(100)]
    elapsed = time.perf_counter() - start
    ok = (len(checks) == 14 and all(c.ok and c.tol == 1e-12 for c in checks)
          and min(refuted_res) >= 1e-6 and min(controls) >= 1e-6 and elapsed < 60)
    verdict(7, ok, f"14 families max residual {worst_member:.1e} <= 1e-12; refuted candidates "
                   f"min {min(refuted_res):.2e}, 200 non-members min {min(controls):.2e} >= 1e-6 [{elapsed:.1f}s < 60s]")


def test_criterion_8_properties(verdict, F13):
    rng = np.random.default_rng(8)
    failures = []

    # mean-value bounds, symmetry, homogeneity
    for _ in range(2000):
        p, q = rng.uniform(-4, 4, 2)
        x, y, lam = 10.0 ** rng.uniform(-2, 2, 3)
        for make in (stolarsky, gini):
            m = make(p, q)
            val = m(x, y)
            if not min(x, y) <= val <= max(x, y):
                failures.append("mean-value")
            if abs(val - m(y, x)) > 1e-13 * val:
                failures.append("symmetry")
            if abs(m(lam * x, lam * y) - lam * val) > 1e-12 * lam * val:
                failures.append("homogeneity")

    # exp/log roundtrip on a series with rational coefficients
    one = MultiPoly.const(("q",), 1)
    coeffs = [rational(int(n), int(d)) for n, d in zip(rng.integers(-9, 10, 7), rng.integers(1, 10, 7))]
    f = TruncSeries([one * 0] + [one * c for c in coeffs])
    if series_log_unit(series_exp_nilpotent(f)) != f:
        failures.append("exp/log")

    # divisibility is exact or raises
    V = ("w", "v", "t", "r", "s")
    w, v, t, r, s = MultiPoly.gens(V)
    a, b = (w - v) ** 3 * (r + 2 * s), w * v + t ** 2
    if (a * b).exact_div(b) != a:
        failures.append("exact division")

    # parity projection: conjugation invariance and surviving even part
    ext = RadicalExtension(V, [r + s, r - s, t])
    e = (ext.gen("w") + ext.radical(0)) * (ext.gen("w") - ext.radical(0))
    if e.parity_project() != w ** 2 - r - s or any(e.conjugate(k) != e for k in range(8)):
        failures.append("parity")

    # every reparametrised coefficient is radical free (enforced during the build) and odd orders vanish
    if any(not F13[n].is_zero() for n in range(1, 13, 2)):
        failures.append("odd orders")

    # elimination self-consistency
    bt, c6, br, _ = _elimination(F13)
    if not (apply_bindings(F13[4], [bt]).is_zero() and apply_bindings(F13[6], [bt, br]).is_zero()):
        failures.append("elimination")

    # symmetric-function cross-check of C4 and C6
    if symmetric_crosscheck((4, 6)) != {4: True, 6: True}:
        failures.append("symmetric cross-check")

    ok = not failures
    verdict(8, ok, "mean-value, symmetry, homogeneity, exp/log, exact division, parity, elimination, "
                   "symmetric cross-check" + (f" failed: {sorted(set(failures))}" if failures else " all hold"))
