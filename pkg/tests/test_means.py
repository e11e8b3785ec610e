import math
from math import comb

import numpy as np
import pytest

from stolinv.means import (
    GINI,
    STOLARSKY,
    L_numeric,
    MeanDomainError,
    MeanParams,
    equality_check,
    gini,
    gini_eval,
    invariance_residual,
    relative_residual,
    stolarsky,
    stolarsky_eval,
    stolarsky_eval_truncated,
)

RNG_SEED = 20240611


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


# ---- worked values -------------------------------------------------------------------


def test_stolarsky_values():
    assert stolarsky(2, 1)(1, 3) == pytest.approx(2.0, rel=1e-15)
    assert stolarsky(1, -1)(4, 9) == pytest.approx(6.0, rel=1e-15)
    assert stolarsky(0, 0)(4, 9) == 6.0
    for p, q in ((2, 1), (0, 0), (3, 3), (0, 5)):
        assert stolarsky(p, q)(5, 5) == 5
    assert stolarsky(3, 1)(1, 2) == pytest.approx(math.sqrt(7 / 3), rel=1e-15)
    # logarithmic mean S_{1,0}
    assert stolarsky(1, 0)(1, math.e) == pytest.approx(math.e - 1, rel=1e-15)


def test_gini_values():
    assert gini(1, 0)(1, 3) == pytest.approx(2.0, rel=1e-15)
    assert gini(2, 1)(1, 2) == pytest.approx(5 / 3, rel=1e-15)
    assert gini(2, 2)(7, 7) == 7
    # p == q branch: exp((x^p log x + y^p log y)/(x^p + y^p))
    x, y, p = 2.0, 5.0, 1.5
    want = math.exp((x**p * math.log(x) + y**p * math.log(y)) / (x**p + y**p))
    assert gini(p, p)(x, y) == pytest.approx(want, rel=1e-14)


def test_L_values():
    assert L_numeric(0, 0) == 1
    assert L_numeric(1, 1) == pytest.approx(math.e, rel=1e-15)
    assert L_numeric(1, 0) == pytest.approx(math.e - 1, rel=1e-15)
    assert L_numeric(1e-9, -1e-9) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("x,y", [(0, 1), (-1, 2), (1, float("nan")), (float("inf"), 1)])
def test_domain_errors(x, y):
    with pytest.raises(MeanDomainError):
        stolarsky_eval(stolarsky(2, 1), x, y)
    with pytest.raises(MeanDomainError):
        gini_eval(gini(2, 1), x, y)


def test_bad_params():
    with pytest.raises(ValueError):
        MeanParams("power", 1, 0)
    with pytest.raises(ValueError):
        stolarsky(float("inf"), 1)


def test_truncated_mean():
    for k in (2, 6, 12):
        assert stolarsky_eval_truncated(k, stolarsky(2, 1), 1, 1) == 1
    assert abs(stolarsky_eval_truncated(6, stolarsky(2, 1), 1, 1.1) - 1.05) < 1e-6
    assert abs(stolarsky_eval_truncated(2, stolarsky(3, 1), 1, 4) - stolarsky(3, 1)(1, 4)) > 1e-3
    with pytest.raises(ValueError):
        stolarsky_eval_truncated(1, stolarsky(2, 1), 1, 2)
    with pytest.raises(MeanDomainError):
        stolarsky_eval_truncated(6, stolarsky(2, 1), -1, 2)


def test_residual_examples():
    A, H, G = gini(1, 0), gini(-1, 0), stolarsky(0, 0)
    for x, y in ((1, 2), (0.3, 70), (5, 5)):
        assert abs(invariance_residual(G, A, H, x, y)) <= 1e-12 * G(x, y)
    m = stolarsky(3, 1)
    assert relative_residual(m, m, m, 2, 5) <= 1e-12
    root = math.sqrt(13)
    refuted = relative_residual(stolarsky(3 + root, 3 - root), stolarsky(7, 5), stolarsky(1, -1), math.e, 1 / math.e)
    assert refuted > 1e-6


def test_equality_check():
    assert equality_check(1, -1, 2, -2)
    assert equality_check(3, 1, 1, 3)
    assert not equality_check(2, 1, 3, 1)
    with pytest.raises(ValueError):
        equality_check(1, 2, 1, 2, samples=0)


# ---- properties --------------------------------------------------------------------


def _random_params(rng, n):
    pq = rng.uniform(-6, 6, size=(n, 2))
    # a share of exact branch cases
    k = n // 10
    pq[:k, 1] = pq[:k, 0]
    pq[k:2 * k, 1] = 0.0
    pq[2 * k:3 * k, 1] = -pq[2 * k:3 * k, 0]
    pq[3 * k:3 * k + 10] = 0.0
    return pq


@pytest.mark.parametrize("family", [STOLARSKY, GINI])
def test_mean_value_property(family):
    rng = np.random.default_rng(RNG_SEED)
    n = 100_000
    pq = _random_params(rng, n)
    xy = 10.0 ** rng.uniform(-3, 3, size=(n, 2))
    for (p, q), (x, y) in zip(pq.tolist(), xy.tolist()):
        m = MeanParams(family, p, q)(x, y)
        assert min(x, y) <= m <= max(x, y), (p, q, x, y, m)


@pytest.mark.parametrize("family", [STOLARSKY, GINI])
def test_double_symmetry(family):
    rng = np.random.default_rng(RNG_SEED + 1)
    pq = _random_params(rng, 5000)
    xy = 10.0 ** rng.uniform(-2, 2, size=(5000, 2))
    for (p, q), (x, y) in zip(pq.tolist(), xy.tolist()):
        base = MeanParams(family, p, q)(x, y)
        assert rel(base, MeanParams(family, q, p)(x, y)) <= 1e-13
        assert rel(base, MeanParams(family, p, q)(y, x)) <= 1e-13


def test_homogeneity():
    rng = np.random.default_rng(RNG_SEED + 2)
    pq = _random_params(rng, 5000)
    data = rng.uniform(-2, 2, size=(5000, 2))
    lam = 10.0 ** rng.uniform(-3, 3, size=5000)
    for (p, q), (lx, ly), s in zip(pq.tolist(), data.tolist(), lam.tolist()):
        x, y = 10.0**lx, 10.0**ly
        m = stolarsky(p, q)
        assert rel(m(s * x, s * y), s * m(x, y)) <= 1e-12


@pytest.mark.parametrize("p", [2.0, -1.5, 0.5])
def test_branch_continuity_at_q0(p):
    x, y = 0.7, 3.1
    at0 = stolarsky(p, 0)(x, y)
    errs = [abs(stolarsky(p, q)(x, y) - at0) for q in (1e-5, 1e-6, 1e-7)]
    assert all(e < 1e-4 for e in errs)
    assert errs[0] > errs[1] > errs[2]


def test_branch_continuity_at_diagonal_pq():
    x, y = 0.7, 3.1
    at = stolarsky(1.3, 1.3)(x, y)
    errs = [abs(stolarsky(1.3, 1.3 + h)(x, y) - at) for h in (1e-5, 1e-6, 1e-7)]
    assert all(e < 1e-4 for e in errs) and errs[0] > errs[2]


def test_near_diagonal_guard_is_smooth():
    m = stolarsky(2.5, -0.5)
    # straddle |p*delta| = 1e-3
    for d in (3.9e-4, 3.99999e-4, 4.00001e-4, 4.1e-4):
        x, y = math.exp(d / 2), math.exp(-d / 2)
        assert abs(m(x, y) - 1.0) < 1e-6
    lo = m(math.exp(2e-4 - 1e-12), math.exp(-2e-4 + 1e-12))
    hi = m(math.exp(2e-4 + 1e-12), math.exp(-2e-4 - 1e-12))
    assert abs(lo - hi) < 1e-14


# ---- derivatives at the diagonal -------------------------------------------------------


def _mixed_partial(f, i, j, h):
    total = 0.0
    for a in range(i + 1):
        for b in range(j + 1):
            c = (-1) ** (a + b) * comb(i, a) * comb(j, b)
            total += c * f(1 + (i / 2 - a) * h, 1 + (j / 2 - b) * h)
    return total / h ** (i + j)


def _richardson(f, i, j, h=1e-2):
    return (4 * _mixed_partial(f, i, j, h / 2) - _mixed_partial(f, i, j, h)) / 3


@pytest.mark.parametrize("p,q", [(2, 1), (3, -1), (1.5, 1.5), (0.5, 0), (-2, 0.75)])
def test_diagonal_derivatives_match_truncation(p, q):
    m = stolarsky(p, q)
    S = lambda x, y: m(x, y)
    Sk = lambda x, y: stolarsky_eval_truncated(6, m, x, y)
    for i in range(1, 4):
        for j in range(1, 5 - i):
            a, b = _richardson(S, i, j), _richardson(Sk, i, j)
            assert abs(a - b) <= 1e-5, (i, j, a, b)


# ---- w = 0 reduction ----------------------------------------------------------------


@pytest.mark.parametrize("abcd,expect", [
    ((2, 5, -2, -5), True),
    ((1, -1, 2, -2), True),
    ((0.5, 3, -3, -0.5), True),
    ((2, 5, -2, -4), False),
    ((1, 2, 1, 2), False),
])
def test_product_identity_for_geometric_outer_mean(abcd, expect):
    a, b, c, d = abcd
    M, N = stolarsky(a, b), stolarsky(c, d)
    rng = np.random.default_rng(RNG_SEED + 3)
    worst = worst_inv = 0.0
    for lx, ly in rng.uniform(-2, 2, size=(300, 2)).tolist():
        x, y = 10.0**lx, 10.0**ly
        worst = max(worst, rel(M(x, y) * N(x, y), x * y))
        worst_inv = max(worst_inv, rel(M(x, y), 1 / N(1 / x, 1 / y)))
    assert (worst <= 1e-12) == expect
    assert (worst_inv <= 1e-12) == expect
