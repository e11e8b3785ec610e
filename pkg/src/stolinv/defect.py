"""Exact construction of the truncated invariance defect series.

In logarithmic coordinates a Stolarsky mean becomes

    E(p, q, u, v) = (log L(p u, p v) - log L(q u, q v)) / (p - q),

and the invariance equation along the anti-diagonal ``(x, -x)`` becomes
``F(x) = E(p, q, E(a, b, x, -x), E(c, d, x, -x)) - E(p, q, x, -x) = 0``.
Replacing ``L`` by its ``k``-term truncation ``L_k`` gives ``F_k``, whose
Taylor coefficients up to order ``k - 1`` agree with those of ``F``.

Two parameter rings are supported:

``raw``
    polynomials in ``a, b, c, d, p, q``; divisions by ``a-b`` etc. are exact
    polynomial divisions.
``reparam``
    polynomials in ``w, v, t, r, s`` extended by ``sqrt(r+s)``, ``sqrt(r-s)``
    and ``sqrt(t)``, with ``a = w+v+sqrt(r+s)``, ``b = w+v-sqrt(r+s)``,
    ``c = w-v+sqrt(r-s)``, ``d = w-v-sqrt(r-s)``, ``p = w+sqrt(t)``,
    ``q = w-sqrt(t)``.  Every coefficient must come out radical-free.
"""

from __future__ import annotations

from dataclasses import dataclass

from .multipoly import MultiPoly
from .series_ext import (
    ExtElement,
    ParityError,
    RadicalExtension,
    TruncSeries,
    L_coefficients,
    compose_bivariate,
    series_div_param,
    series_log_unit,
)

RAW_VARS = ("a", "b", "c", "d", "p", "q")
REPARAM_VARS = ("w", "v", "t", "r", "s")


@dataclass(frozen=True)
class ParameterRing:
    name: str
    vars: tuple
    a: object
    b: object
    c: object
    d: object
    p: object
    q: object
    ext: RadicalExtension | None = None

    def one(self):
        return self.ext.one() if self.ext else MultiPoly.const(self.vars, 1)

    def base_one(self):
        return MultiPoly.const(self.vars, 1)


def raw_ring() -> ParameterRing:
    a, b, c, d, p, q = MultiPoly.gens(RAW_VARS)
    return ParameterRing("raw", RAW_VARS, a, b, c, d, p, q)


def reparam_ring() -> ParameterRing:
    w, v, t, r, s = MultiPoly.gens(REPARAM_VARS)
    ext = RadicalExtension(
        REPARAM_VARS, [r + s, r - s, t], names=["sqrt(r+s)", "sqrt(r-s)", "sqrt(t)"]
    )
    W, V = ext.base(w), ext.base(v)
    alpha, beta, gamma = ext.radical(0), ext.radical(1), ext.radical(2)
    return ParameterRing(
        "reparam",
        REPARAM_VARS,
        W + V + alpha,
        W + V - alpha,
        W - V + beta,
        W - V - beta,
        W + gamma,
        W - gamma,
        ext,
    )


def ring_for(parametrization: str) -> ParameterRing:
    if parametrization in ("raw", "raw_abcdpq"):
        return raw_ring()
    if parametrization == "reparam":
        return reparam_ring()
    raise ValueError(f"unknown parametrization {parametrization!r}")


def _project(series: TruncSeries, what: str) -> TruncSeries:
    out = []
    for n, c in enumerate(series.coeffs):
        if isinstance(c, ExtElement):
            try:
                c = c.parity_project()
            except ParityError as exc:
                raise ParityError(f"{what}: coefficient of x^{n}: {exc}") from None
        out.append(c)
    return TruncSeries(out)


def log_mean_series(k: int, p, q, g: TruncSeries, h: TruncSeries) -> TruncSeries:
    """Series of E_k(p, q, g(x), h(x)) for p != q symbolically."""
    Lk = L_coefficients(k)
    lp = series_log_unit(compose_bivariate(Lk, p, p, g, h))
    lq = series_log_unit(compose_bivariate(Lk, q, q, g, h))
    return series_div_param(lp - lq, p - q)


def build_defect_series(k: int, parametrization: str = "reparam", ring: ParameterRing | None = None) -> TruncSeries:
    """Truncated Taylor series of F_k at 0, through order k - 1.

    Under ``reparam`` every intermediate and final coefficient is checked to
    be radical-free; a surviving radical raises :class:`ParityError`.
    """
    if k < 3:
        raise ValueError("the defect series needs k >= 3")
    ring = ring or ring_for(parametrization)
    K = k - 1
    one = ring.base_one()
    x = TruncSeries.variable(one, K)
    mx = -x
    U = log_mean_series(k, ring.a, ring.b, x, mx)
    V = log_mean_series(k, ring.c, ring.d, x, mx)
    D = log_mean_series(k, ring.p, ring.q, x, mx)
    if ring.ext is not None:
        U = _project(U, "E_k(a, b, x, -x)")
        V = _project(V, "E_k(c, d, x, -x)")
        D = _project(D, "E_k(p, q, x, -x)")
    outer = log_mean_series(k, ring.p, ring.q, U, V)
    if ring.ext is not None:
        outer = _project(outer, "E_k(p, q, U, V)")
    return outer - D


def coefficient(series: TruncSeries, order: int):
    if order > series.order:
        raise ValueError(f"order {order} exceeds the truncation order {series.order}")
    return series.coeffs[order]
