"""Radical extensions of a polynomial ring and truncated power series.

``RadicalExtension`` adjoins square roots ``rho_i = sqrt(radicand_i)`` of
polynomials to a :class:`MultiPoly` ring.  An element is a sum of
``f_mask * prod(rho_i for bit i in mask)``; products are reduced eagerly with
``rho_i**2 -> radicand_i``.  The reparametrised parameter ring uses three
radicals ``sqrt(r+s)``, ``sqrt(r-s)``, ``sqrt(t)``; the numerical refutation
uses the single radical ``sqrt(13)`` over an empty variable set.

``TruncSeries`` is a univariate series in ``x`` truncated after ``x**K`` whose
coefficients are polynomials or extension elements.
"""

from __future__ import annotations

from functools import cached_property
from itertools import product
from math import factorial
from typing import Sequence

import gmpy2

from .exact import ExactArithmeticError, Rational, rational
from .multipoly import InexactDivisionError, MultiPoly, VarSetMismatch

_mpq = gmpy2.mpq


class ParityError(ExactArithmeticError):
    """A quantity that must be free of radicals is not."""


class SeriesError(ExactArithmeticError, ValueError):
    pass


class RadicalExtension:
    def __init__(self, vars: Sequence[str], radicands: Sequence, names: Sequence[str] | None = None):
        self.vars = tuple(vars)
        rads = []
        for r in radicands:
            if not isinstance(r, MultiPoly):
                r = MultiPoly.const(self.vars, r)
            if r.vars != self.vars:
                raise VarSetMismatch("radicands must live in the base variable set")
            rads.append(r)
        self.radicands = tuple(rads)
        self.names = tuple(names) if names else tuple(f"sqrt({r})" for r in rads)
        self.n = len(rads)
        one = MultiPoly.const(self.vars, 1)
        self._overlap = []
        for mask in range(1 << self.n):
            f = one
            for i in range(self.n):
                if mask >> i & 1:
                    f = f * self.radicands[i]
            self._overlap.append(f)

    def __eq__(self, other):
        return isinstance(other, RadicalExtension) and (
            self.vars == other.vars and self.radicands == other.radicands
        )

    def __hash__(self):
        return hash((self.vars, self.radicands))

    def __repr__(self):
        return f"RadicalExtension({self.vars}, {[str(r) for r in self.radicands]})"

    def element(self, components: dict) -> "ExtElement":
        comps = {}
        for mask, f in components.items():
            if not isinstance(f, MultiPoly):
                f = MultiPoly.const(self.vars, f)
            if f:
                comps[mask] = f
        return ExtElement(self, comps)

    def base(self, f) -> "ExtElement":
        return self.element({0: f})

    def radical(self, i: int) -> "ExtElement":
        return self.element({1 << i: 1})

    def gen(self, name: str) -> "ExtElement":
        return self.base(MultiPoly.var(self.vars, name))

    def zero(self) -> "ExtElement":
        return ExtElement(self, {})

    def one(self) -> "ExtElement":
        return self.base(1)


class ExtElement:
    __slots__ = ("ring", "comps")

    def __init__(self, ring: RadicalExtension, comps: dict):
        self.ring = ring
        self.comps = comps

    @property
    def vars(self):
        return self.ring.vars

    def _lift(self, other):
        if isinstance(other, ExtElement):
            if other.ring is not self.ring and other.ring != self.ring:
                raise VarSetMismatch("elements of different radical extensions")
            return other
        if isinstance(other, MultiPoly):
            if other.vars != self.ring.vars:
                raise VarSetMismatch("polynomial lives outside the extension's base ring")
            return ExtElement(self.ring, {0: other} if other else {})
        if isinstance(other, (int, Rational)):
            return self.ring.base(other)
        return None

    def is_zero(self) -> bool:
        return not self.comps

    def __bool__(self):
        return bool(self.comps)

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        comps = dict(self.comps)
        for m, f in other.comps.items():
            g = comps[m] + f if m in comps else f
            if g:
                comps[m] = g
            else:
                comps.pop(m, None)
        return ExtElement(self.ring, comps)

    __radd__ = __add__

    def __neg__(self):
        return ExtElement(self.ring, {m: -f for m, f in self.comps.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            c = rational(other)
            if not c:
                return ExtElement(self.ring, {})
            return ExtElement(self.ring, {m: f.scale(c) for m, f in self.comps.items()})
        other = self._lift(other)
        if other is None:
            return NotImplemented
        overlap = self.ring._overlap
        acc: dict = {}
        for m1, f1 in self.comps.items():
            for m2, f2 in other.comps.items():
                prod_ = f1 * f2
                o = m1 & m2
                if o:
                    prod_ = prod_ * overlap[o]
                m = m1 ^ m2
                acc[m] = acc[m] + prod_ if m in acc else prod_
        return ExtElement(self.ring, {m: f for m, f in acc.items() if f})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        other = self._lift(other) if not isinstance(other, ExtElement) else other
        if other is None:
            return NotImplemented
        return self.ring == other.ring and self.comps == other.comps

    def __hash__(self):
        return hash(frozenset(self.comps.items()))

    def zero_like(self):
        return ExtElement(self.ring, {})

    def one_like(self):
        return self.ring.one()

    def conjugate(self, flip: int) -> "ExtElement":
        """Apply rho_i -> -rho_i for every bit i set in ``flip``."""
        return ExtElement(
            self.ring,
            {m: (-f if bin(m & flip).count("1") % 2 else f) for m, f in self.comps.items()},
        )

    def is_radical_free(self) -> bool:
        return all(m == 0 for m in self.comps)

    def parity_project(self) -> MultiPoly:
        """Radical-free part; raises ParityError if any radical component survives."""
        bad = [m for m in self.comps if m]
        if bad:
            names = [
                "*".join(self.ring.names[i] for i in range(self.ring.n) if m >> i & 1) for m in bad
            ]
            raise ParityError(f"radical components survive: {names}")
        return self.comps.get(0, MultiPoly.zero(self.ring.vars))

    def exact_div(self, den) -> "ExtElement":
        """Exact quotient in the extension ring (via the norm of ``den``)."""
        den = self._lift(den)
        if den is None or den.is_zero():
            raise ZeroDivisionError("division by zero in radical extension")
        used = 0
        for m in den.comps:
            used |= m
        flips = [f for f in range(1 << self.ring.n) if f & ~used == 0 and f]
        cof = self.ring.one()
        for f in flips:
            cof = cof * den.conjugate(f)
        norm = (den * cof).parity_project()
        num = self * cof
        out = {}
        for m, f in num.comps.items():
            try:
                out[m] = f.exact_div(norm)
            except InexactDivisionError as exc:
                raise InexactDivisionError(
                    f"extension division not exact in component {m}", exc.remainder
                ) from None
        return ExtElement(self.ring, out)

    def __str__(self):
        if not self.comps:
            return "0"
        parts = []
        for m in sorted(self.comps):
            rad = "*".join(self.ring.names[i] for i in range(self.ring.n) if m >> i & 1)
            f = str(self.comps[m])
            parts.append(f if not rad else f"({f})*{rad}")
        return " + ".join(parts)

    __repr__ = __str__


def ext_parity_project(e) -> MultiPoly:
    if isinstance(e, MultiPoly):
        return e
    return e.parity_project()


# ---- truncated series --------------------------------------------------------


class TruncSeries:
    """``c[0] + c[1] x + ... + c[K] x^K`` with exact ring coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        if not coeffs:
            raise SeriesError("a series needs at least the constant coefficient")
        self.coeffs = list(coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c, order: int):
        return cls([c] + [c.zero_like() for _ in range(order)])

    @classmethod
    def variable(cls, one, order: int):
        """The series ``x`` with coefficients in the ring of ``one``."""
        z = one.zero_like()
        return cls([z, one] + [z] * (order - 1)) if order >= 1 else cls([z])

    def __getitem__(self, n):
        return self.coeffs[n]

    def zero_like(self):
        z = self.coeffs[0].zero_like()
        return TruncSeries([z] * len(self.coeffs))

    def valuation(self) -> int:
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                return i
        return len(self.coeffs)

    def _check(self, other):
        if not isinstance(other, TruncSeries):
            return False
        if other.order != self.order:
            raise SeriesError(f"truncation orders differ: {self.order} vs {other.order}")
        return True

    def __add__(self, other):
        if not self._check(other):
            return NotImplemented
        return TruncSeries([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        if not self._check(other):
            return NotImplemented
        return TruncSeries([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return TruncSeries([-a for a in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            # ring scalar
            return TruncSeries([c * other for c in self.coeffs])
        self._check(other)
        K = self.order
        a = [(i, c) for i, c in enumerate(self.coeffs) if not c.is_zero()]
        b = [(j, c) for j, c in enumerate(other.coeffs) if not c.is_zero()]
        out = [None] * (K + 1)
        for i, ca in a:
            for j, cb in b:
                if i + j > K:
                    break
                t = ca * cb
                out[i + j] = t if out[i + j] is None else out[i + j] + t
        z = self.coeffs[0].zero_like()
        return TruncSeries([z if c is None else c for c in out])

    def __rmul__(self, other):
        return TruncSeries([c * other for c in self.coeffs])

    def map(self, fn):
        return TruncSeries([fn(c) for c in self.coeffs])

    def __eq__(self, other):
        return isinstance(other, TruncSeries) and self.coeffs == other.coeffs

    def __str__(self):
        parts = []
        for n, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            body = str(c)
            wrapped = f"({body})" if n else body
            parts.append(wrapped if n == 0 else f"{wrapped}*x" + (f"^{n}" if n > 1 else ""))
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


def series_arith(lhs: TruncSeries, rhs: TruncSeries, op: str) -> TruncSeries:
    if lhs.order != rhs.order:
        raise SeriesError(f"truncation orders differ: {lhs.order} vs {rhs.order}")
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown series operation {op!r}")


def _compose_univariate(f: TruncSeries, coeffs: Sequence[Rational]) -> TruncSeries:
    """sum_n coeffs[n] * u**n with u = f - f[0], f[0] required to be 1."""
    u = TruncSeries([f.coeffs[0].zero_like()] + f.coeffs[1:])
    K = f.order
    one = f.coeffs[0].one_like()
    acc = TruncSeries.constant(one * coeffs[0], K) if coeffs[0] else TruncSeries.constant(one.zero_like(), K)
    power = None
    val = u.valuation()
    for n in range(1, len(coeffs)):
        if val * n > K:
            break
        power = u if power is None else power * u
        if coeffs[n]:
            acc = acc + power * _mpq(coeffs[n])
    return acc


def _require_unit(f: TruncSeries):
    c0 = f.coeffs[0]
    if c0 != c0.one_like():
        raise SeriesError("constant coefficient must be exactly 1")


def series_log_unit(f: TruncSeries) -> TruncSeries:
    """log f for a series with constant term 1, via log(1+u) = sum (-1)^(n+1) u^n / n."""
    _require_unit(f)
    K = f.order
    coeffs = [_mpq(0)] + [_mpq((-1) ** (n + 1), n) for n in range(1, K + 1)]
    return _compose_univariate(f, coeffs)


def series_exp_nilpotent(f: TruncSeries) -> TruncSeries:
    """exp f for a series with zero constant term."""
    if not f.coeffs[0].is_zero():
        raise SeriesError("exp needs a zero constant coefficient")
    K = f.order
    one = f.coeffs[0].one_like()
    g = TruncSeries([one] + f.coeffs[1:])
    return _compose_univariate(g, [_mpq(1, factorial(n)) for n in range(K + 1)])


def series_div_param(f: TruncSeries, g) -> TruncSeries:
    """Divide every coefficient exactly by the ring element ``g``."""
    out = []
    for n, c in enumerate(f.coeffs):
        if c.is_zero():
            out.append(c)
            continue
        try:
            if isinstance(c, ExtElement):
                out.append(c.exact_div(g))
            elif isinstance(g, ExtElement):
                out.append(g.ring.base(c).exact_div(g))
            else:
                out.append(c.exact_div(g))
        except InexactDivisionError as exc:
            raise InexactDivisionError(
                f"coefficient of x^{n} is not divisible by {g}", exc.remainder
            ) from None
    return TruncSeries(out)


def L_coefficients(k: int) -> dict:
    """Bivariate coefficients {(i, j): 1/(i+j+1)!} of L_k(u, v), i + j <= k - 1."""
    if k < 1:
        raise ValueError("L_k needs k >= 1")
    return {(i, n - 1 - i): _mpq(1, factorial(n)) for n in range(1, k + 1) for i in range(n)}


def compose_bivariate(Lk: dict, scaleU, scaleV, g: TruncSeries, h: TruncSeries) -> TruncSeries:
    """Evaluate ``sum c_ij (scaleU*g)^i (scaleV*h)^j`` as a truncated series.

    Powers of g and h are formed in their own coefficient ring; the scale
    factors are applied once per group of terms that share them, so when
    ``scaleV`` is ``scaleU`` or ``-scaleU`` every product stays radical-free
    until the final multiplication by ``scaleU**n``.
    """
    if g.order != h.order:
        raise SeriesError(f"truncation orders differ: {g.order} vs {h.order}")
    K = g.order
    maxi = max(i for i, _ in Lk)
    maxj = max(j for _, j in Lk)
    gv, hv = g.valuation(), h.valuation()

    def powers(s, m, val):
        out = [TruncSeries.constant(s.coeffs[0].one_like(), K)]
        for n in range(1, m + 1):
            if val * n > K:
                break
            out.append(out[-1] * s)
        return out

    gp, hp = powers(g, maxi, gv), powers(h, maxj, hv)

    def scalar_eq(x, y):
        try:
            return bool(x == y)
        except (VarSetMismatch, TypeError):
            return False

    if scalar_eq(scaleU, scaleV):
        mode = 1
    elif scalar_eq(scaleU, -scaleV):
        mode = -1
    else:
        mode = 0

    zero_series = g.zero_like()
    if mode:
        groups: dict = {}
        for (i, j), c in Lk.items():
            if i >= len(gp) or j >= len(hp):
                continue
            term = gp[i] * hp[j]
            if mode == -1 and j % 2:
                c = -c
            n = i + j
            groups[n] = groups[n] + term * c if n in groups else term * c
        total = None
        for n in sorted(groups):
            part = groups[n] * (scaleU ** n) if n else groups[n] * scaleU.one_like()
            total = part if total is None else total + part
        return total if total is not None else zero_series
    total = None
    for (i, j), c in Lk.items():
        if i >= len(gp) or j >= len(hp):
            continue
        factor = (scaleU ** i) * (scaleV ** j) * c
        part = (gp[i] * hp[j]) * factor
        total = part if total is None else total + part
    return total if total is not None else zero_series
