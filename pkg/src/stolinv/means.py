"""Floating-point Stolarsky and Gini means.

Evaluation happens in logarithmic coordinates ``u = log x``, ``v = log y``
with ``m = (u + v)/2`` and ``delta = u - v``.  Writing
``L(u, v) = (e^u - e^v)/(u - v)`` one has

    log L(p u, p v) = p m + phi(p delta),   phi(z) = log(sinh(z/2) / (z/2)),

so every Stolarsky branch reduces to ``m`` plus a divided difference of the
even function ``phi``.  Gini means work the same way with ``log cosh``.
Near the diagonal (``|p delta| < TAU``) ``phi`` is taken from the truncated
series ``L_k`` instead of the closed form.

Parameters are dispatched on exact equality (``p == q``, ``q == 0``...); they
are never snapped to a nearby branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import factorial

TAU = 1e-3
K_TAU = 12

STOLARSKY = "stolarsky"
GINI = "gini"


class MeanDomainError(ValueError):
    pass


@dataclass(frozen=True)
class MeanParams:
    family: str
    p: float
    q: float

    def __post_init__(self):
        if self.family not in (STOLARSKY, GINI):
            raise ValueError(f"unknown mean family {self.family!r}")
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise ValueError("mean parameters must be finite")

    def __call__(self, x: float, y: float) -> float:
        if self.family == STOLARSKY:
            return stolarsky_eval(self, x, y)
        return gini_eval(self, x, y)


def stolarsky(p, q) -> MeanParams:
    return MeanParams(STOLARSKY, float(p), float(q))


def gini(p, q) -> MeanParams:
    return MeanParams(GINI, float(p), float(q))


def _check(x, y):
    if not (x > 0 and y > 0) or not (math.isfinite(x) and math.isfinite(y)):
        raise MeanDomainError(f"means need positive finite arguments, got ({x}, {y})")


def _clamp(val, x, y):
    lo, hi = (x, y) if x <= y else (y, x)
    return min(max(val, lo), hi)


# ---- the L function -----------------------------------------------------------


def _Lk_diag(y: float, k: int) -> float:
    """L_k(y, -y) = sum over odd n <= k of y^(n-1)/n!."""
    y2 = y * y
    total, term = 0.0, 1.0
    for n in range(1, k + 1, 2):
        total += term / factorial(n)
        term *= y2
    return total


def _Lk_diag_dlog(y: float, k: int) -> float:
    """d/dy log L_k(y, -y)."""
    num = 0.0
    for n in range(3, k + 1, 2):
        num += (n - 1) * y ** (n - 2) / factorial(n)
    return num / _Lk_diag(y, k)


def L_numeric(u: float, v: float) -> float:
    """L(u, v) = (e^u - e^v)/(u - v), with L(u, u) = e^u."""
    d = u - v
    if abs(d) >= TAU:
        return math.exp(v) * math.expm1(d) / d
    return math.exp((u + v) / 2) * _Lk_diag(d / 2, K_TAU)


def _phi(z: float) -> float:
    """log L(z/2, -z/2) = log(sinh(z/2)/(z/2)), even in z."""
    y = abs(z) / 2
    if abs(z) < TAU:
        return math.log(_Lk_diag(y, K_TAU))
    if y > 20:
        return y - math.log(2 * y) + math.log1p(-math.exp(-2 * y))
    return math.log(math.sinh(y) / y)


def _dphi(z: float) -> float:
    """phi'(z) = coth(z/2)/2 - 1/z (odd in z)."""
    if abs(z) < TAU:
        return _Lk_diag_dlog(z / 2, K_TAU) / 2
    return 0.5 / math.tanh(z / 2) - 1.0 / z


# ---- Stolarsky ---------------------------------------------------------------


def stolarsky_log(p: float, q: float, u: float, v: float) -> float:
    """log S_{p,q}(e^u, e^v)."""
    if u == v:
        return u
    m, d = (u + v) / 2, u - v
    if p == 0 and q == 0:
        return m
    if p == q:
        return m + d * _dphi(p * d)
    if q == 0:
        return m + _phi(p * d) / p
    if p == 0:
        return m + _phi(q * d) / q
    return m + (_phi(p * d) - _phi(q * d)) / (p - q)


def stolarsky_eval(m: MeanParams, x: float, y: float) -> float:
    _check(x, y)
    if x == y:
        return x
    p, q = m.p, m.q
    if p == 0 and q == 0:
        return math.sqrt(x) * math.sqrt(y)
    return _clamp(math.exp(stolarsky_log(p, q, math.log(x), math.log(y))), x, y)


# ---- Gini ---------------------------------------------------------------------


def _logcosh(y: float) -> float:
    a = abs(y)
    return a + math.log1p(math.exp(-2 * a)) - math.log(2)


def gini_log(p: float, q: float, u: float, v: float) -> float:
    """log G_{p,q}(e^u, e^v)."""
    if u == v:
        return u
    m, d = (u + v) / 2, u - v
    if p == q:
        return m + d / 2 * math.tanh(p * d / 2)
    return m + (_logcosh(p * d / 2) - _logcosh(q * d / 2)) / (p - q)


def gini_eval(m: MeanParams, x: float, y: float) -> float:
    _check(x, y)
    if x == y:
        return x
    return _clamp(math.exp(gini_log(m.p, m.q, math.log(x), math.log(y))), x, y)


# ---- truncated approximants -----------------------------------------------------


def Lk_numeric(k: int, U: float, V: float) -> float:
    """L_k(U, V) = sum_{n=1}^{k} (U^(n-1) + U^(n-2) V + ... + V^(n-1)) / n!."""
    total = 0.0
    for n in range(1, k + 1):
        h = sum(U ** (n - 1 - i) * V ** i for i in range(n))
        total += h / factorial(n)
    return total


def _Lk_grad(k: int, U: float, V: float):
    d1 = d2 = 0.0
    for n in range(2, k + 1):
        for i in range(n):
            a, b = n - 1 - i, i
            if a:
                d1 += a * U ** (a - 1) * V ** b / factorial(n)
            if b:
                d2 += b * U ** a * V ** (b - 1) / factorial(n)
    return d1, d2


def stolarsky_eval_truncated(k: int, m: MeanParams, x: float, y: float) -> float:
    """The approximant S^k_{p,q}(x, y) built from L_k."""
    if k < 2:
        raise ValueError("the truncated mean needs k >= 2")
    _check(x, y)
    u, v = math.log(x), math.log(y)
    p, q = m.p, m.q
    if p != q:
        lp, lq = Lk_numeric(k, p * u, p * v), Lk_numeric(k, q * u, q * v)
        if lp <= 0 or lq <= 0:
            raise MeanDomainError(f"L_{k} is not positive at ({x}, {y}); the approximant is undefined")
        return (lp / lq) ** (1.0 / (p - q))
    L = Lk_numeric(k, p * u, p * v)
    if L <= 0:
        raise MeanDomainError(f"L_{k} is not positive at ({x}, {y}); the approximant is undefined")
    d1, d2 = _Lk_grad(k, p * u, p * v)
    return math.exp((d1 * u + d2 * v) / L)


# ---- invariance ---------------------------------------------------------------


def invariance_residual(outer: MeanParams, inner1: MeanParams, inner2: MeanParams, x: float, y: float) -> float:
    """K(M(x, y), N(x, y)) - K(x, y)."""
    return outer(inner1(x, y), inner2(x, y)) - outer(x, y)


def relative_residual(outer, inner1, inner2, x, y) -> float:
    return abs(invariance_residual(outer, inner1, inner2, x, y)) / outer(x, y)


def equality_check(a, b, c, d, samples: int = 200, seed: int = 0, tol: float = 1e-12) -> bool:
    """Numerically test S_{a,b} == S_{c,d} on log-uniform samples in [1e-2, 1e2]^2."""
    import numpy as np

    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    m1, m2 = stolarsky(a, b), stolarsky(c, d)
    pts = 10.0 ** rng.uniform(-2, 2, size=(samples, 2))
    for x, y in pts:
        s1, s2 = m1(float(x), float(y)), m2(float(x), float(y))
        if abs(s1 - s2) > tol * max(s1, s2):
            return False
    return True
