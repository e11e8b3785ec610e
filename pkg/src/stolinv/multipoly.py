"""Sparse multivariate polynomials over the rationals.

A polynomial lives in a fixed ordered variable set (a tuple of names).  Its
terms are stored in a dict mapping a *packed* exponent vector to a nonzero
``mpq`` coefficient.  Each variable owns a 16-bit field of the packed
integer, the first variable in the most significant field, so comparing
packed keys as integers is lexicographic order.  The top bit of every field is
a guard bit that is never set by a valid exponent; it makes the monomial
divisibility test a single subtraction.

The canonical *printed* order is graded lexicographic, highest term first.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import gmpy2

from .exact import ExactArithmeticError, Rational, format_rational, rational

BITS = 16
FIELD = (1 << BITS) - 1
MAX_EXP = (1 << (BITS - 1)) - 1

_mpq = gmpy2.mpq


class VarSetMismatch(ExactArithmeticError, ValueError):
    pass


class InexactDivisionError(ExactArithmeticError):
    """Raised when a division that must be exact leaves a remainder."""

    def __init__(self, message, remainder=None):
        super().__init__(message)
        self.remainder = remainder


class UnboundVariableError(ExactArithmeticError, KeyError):
    pass


@lru_cache(maxsize=None)
def _layout(nvars: int):
    shifts = tuple(BITS * (nvars - 1 - i) for i in range(nvars))
    guard = 0
    for s in shifts:
        guard |= 1 << (s + BITS - 1)
    return shifts, guard


def _pack(exps: Sequence[int], shifts) -> int:
    key = 0
    for e, s in zip(exps, shifts):
        if e < 0 or e > MAX_EXP:
            raise OverflowError(f"exponent {e} out of range")
        key |= e << s
    return key


def _unpack(key: int, shifts) -> tuple:
    return tuple((key >> s) & FIELD for s in shifts)


def check_varset(names: Sequence[str]) -> tuple:
    names = tuple(names)
    if len(set(names)) != len(names):
        raise ValueError(f"variable names must be unique: {names}")
    return names


class MultiPoly:
    """Immutable polynomial; build with the class methods, not ``__init__``."""

    __slots__ = ("vars", "terms", "_deg")

    def __init__(self, vars: tuple, terms: dict):
        # terms must already be canonical (no zero coefficients, mpq values)
        self.vars = vars
        self.terms = terms
        self._deg = None

    # ---- construction -------------------------------------------------

    @classmethod
    def zero(cls, vars) -> "MultiPoly":
        return cls(check_varset(vars), {})

    @classmethod
    def const(cls, vars, c) -> "MultiPoly":
        c = rational(c)
        return cls(check_varset(vars), {0: c} if c else {})

    @classmethod
    def var(cls, vars, name: str) -> "MultiPoly":
        vars = check_varset(vars)
        shifts, _ = _layout(len(vars))
        return cls(vars, {1 << shifts[vars.index(name)]: _mpq(1)})

    @classmethod
    def gens(cls, vars) -> tuple:
        vars = check_varset(vars)
        return tuple(cls.var(vars, v) for v in vars)

    @classmethod
    def from_dict(cls, vars, data: Mapping) -> "MultiPoly":
        vars = check_varset(vars)
        shifts, _ = _layout(len(vars))
        terms: dict = {}
        for exps, c in data.items():
            if len(exps) != len(vars):
                raise ValueError("exponent vector length does not match variable set")
            k = _pack(exps, shifts)
            c = terms.get(k, 0) + rational(c)
            if c:
                terms[k] = c
            else:
                terms.pop(k, None)
        return cls(vars, terms)

    @classmethod
    def parse(cls, text: str, vars) -> "MultiPoly":
        return parse_poly(text, vars)

    # ---- inspection ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def items(self):
        """Yield ``(exponent tuple, coefficient)`` pairs (unordered)."""
        shifts, _ = _layout(len(self.vars))
        for k, c in self.terms.items():
            yield _unpack(k, shifts), c

    def as_dict(self) -> dict:
        return dict(self.items())

    def coefficient(self, exps: Sequence[int]) -> Rational:
        shifts, _ = _layout(len(self.vars))
        return self.terms.get(_pack(exps, shifts), _mpq(0))

    def coeff_of(self, **powers) -> Rational:
        exps = [powers.get(v, 0) for v in self.vars]
        return self.coefficient(exps)

    def total_degree(self) -> int:
        if self._deg is None:
            shifts, _ = _layout(len(self.vars))
            self._deg = max((sum((k >> s) & FIELD for s in shifts) for k in self.terms), default=-1)
        return self._deg

    def degree(self, var: str) -> int:
        """Degree in ``var``; -1 for the zero polynomial."""
        s = _layout(len(self.vars))[0][self.vars.index(var)]
        return max(((k >> s) & FIELD for k in self.terms), default=-1)

    def variables_present(self) -> tuple:
        shifts, _ = _layout(len(self.vars))
        acc = 0
        for k in self.terms:
            acc |= k
        return tuple(v for v, s in zip(self.vars, shifts) if (acc >> s) & FIELD)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self) -> Rational:
        if not self.is_constant():
            raise ValueError(f"not a constant: {self}")
        return self.terms.get(0, _mpq(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_homogeneous(self, weights: Mapping[str, int] | None = None) -> bool:
        return len(self.weighted_degrees(weights)) <= 1

    def weighted_degrees(self, weights: Mapping[str, int] | None = None) -> set:
        w = [1 if weights is None else weights.get(v, 0) for v in self.vars]
        return {sum(e * wi for e, wi in zip(exps, w)) for exps, _ in self.items()}

    def sorted_terms(self) -> list:
        """Terms in graded-lex order, highest first."""
        return sorted(self.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def leading_term(self):
        return self.sorted_terms()[0] if self.terms else None

    # ---- arithmetic ---------------------------------------------------

    def _check(self, other: "MultiPoly"):
        if self.vars != other.vars:
            raise VarSetMismatch(f"variable sets differ: {self.vars} vs {other.vars}")

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Rational)) or type(other).__name__ in ("Fraction", "mpz"):
            return MultiPoly.const(self.vars, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if len(other.terms) > len(self.terms):
            self, other = other, self
        terms = dict(self.terms)
        for k, c in other.terms.items():
            c = terms.get(k, 0) + c
            if c:
                terms[k] = c
            else:
                del terms[k]
        return MultiPoly(self.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {k: -c for k, c in self.terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for k, c in other.terms.items():
            c = terms.get(k, 0) - c
            if c:
                terms[k] = c
            else:
                del terms[k]
        return MultiPoly(self.vars, terms)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def scale(self, c) -> "MultiPoly":
        c = rational(c)
        if not c:
            return MultiPoly(self.vars, {})
        return MultiPoly(self.vars, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if isinstance(other, (int, Rational)) or type(other).__name__ in ("Fraction", "mpz"):
                return self.scale(other)
            return NotImplemented
        self._check(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return MultiPoly(self.vars, {})
        if self.total_degree() + other.total_degree() > MAX_EXP:
            raise OverflowError("product degree exceeds the packed exponent range")
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return MultiPoly(self.vars, {k: c for k, c in out.items() if c})

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.const(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Rational)):
            return self.is_constant() and self.terms.get(0, 0) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def zero_like(self) -> "MultiPoly":
        return MultiPoly(self.vars, {})

    def one_like(self) -> "MultiPoly":
        return MultiPoly(self.vars, {0: _mpq(1)})

    # ---- division -----------------------------------------------------

    def divmod_monomial_lead(self, den: "MultiPoly"):
        """Multivariate division by leading terms in lex order.

        Returns ``(q, r)`` with ``self == q*den + r`` where no term of ``r`` is
        divisible by the lex-leading monomial of ``den``.
        """
        self._check(den)
        if not den.terms:
            raise ZeroDivisionError("polynomial division by zero")
        import heapq

        _, guard = _layout(len(self.vars))
        lk = max(den.terms)
        lc = den.terms[lk]
        rest = [(k - lk, c) for k, c in den.terms.items() if k != lk]
        work = dict(self.terms)
        heap = [-k for k in work]
        heapq.heapify(heap)
        q: dict = {}
        r: dict = {}
        while heap:
            k = -heapq.heappop(heap)
            c = work.pop(k, None)
            if not c:
                continue
            while heap and heap[0] == -k:
                heapq.heappop(heap)
            if ((k | guard) - lk) & guard == guard:
                m = k - lk
                qc = c / lc
                q[m] = qc
                for dk, dc in rest:
                    nk = m + lk + dk
                    old = work.get(nk)
                    if old is None:
                        work[nk] = -qc * dc
                        heapq.heappush(heap, -nk)
                    else:
                        work[nk] = old - qc * dc
            else:
                r[k] = c
        return MultiPoly(self.vars, q), MultiPoly(self.vars, r)

    def exact_div(self, den: "MultiPoly") -> "MultiPoly":
        if isinstance(den, (int, Rational)):
            if den == 0:
                raise ZeroDivisionError("polynomial division by zero")
            return self.scale(1 / rational(den))
        q, r = self.divmod_monomial_lead(den)
        if r:
            raise InexactDivisionError(f"division is not exact; remainder has {len(r)} terms", r)
        return q

    def divides(self, num: "MultiPoly") -> bool:
        return not num.divmod_monomial_lead(self)[1]

    # ---- content ------------------------------------------------------

    def content(self) -> Rational:
        """Positive rational c such that self/c has coprime integer coefficients."""
        if not self.terms:
            return _mpq(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gmpy2.gcd(num, c.numerator)
            den = gmpy2.lcm(den, c.denominator)
        return _mpq(num, den)

    def primitive(self) -> "MultiPoly":
        c = self.content()
        return self.scale(1 / c) if c else self

    def monomial_content(self) -> tuple:
        """Exponent vector of the gcd of all monomials (zeros for the zero poly)."""
        if not self.terms:
            return (0,) * len(self.vars)
        exps = [list(e) for e, _ in self.items()]
        return tuple(min(col) for col in zip(*exps))

    def shift(self, exps: Sequence[int]) -> "MultiPoly":
        """Multiply by a monomial; negative exponents divide (must stay exact)."""
        shifts, _ = _layout(len(self.vars))
        out = {}
        for e, c in self.items():
            ne = tuple(a + b for a, b in zip(e, exps))
            if min(ne) < 0:
                raise InexactDivisionError("monomial division is not exact")
            out[_pack(ne, shifts)] = c
        return MultiPoly(self.vars, out)

    # ---- change of variables ------------------------------------------

    def with_vars(self, new_vars) -> "MultiPoly":
        """Re-embed in ``new_vars``; every variable present must be kept."""
        new_vars = check_varset(new_vars)
        if new_vars == self.vars:
            return self
        missing = [v for v in self.variables_present() if v not in new_vars]
        if missing:
            raise VarSetMismatch(f"variables {missing} not in {new_vars}")
        idx = [self.vars.index(v) if v in self.vars else None for v in new_vars]
        shifts, _ = _layout(len(new_vars))
        out = {}
        for e, c in self.items():
            out[_pack([0 if i is None else e[i] for i in idx], shifts)] = c
        return MultiPoly(new_vars, out)

    def substitute(self, bindings: Mapping, target_vars=None):
        """Replace variables by polynomials, radical-extension elements or scalars.

        Variables that occur in ``self`` but are not bound are carried over
        unchanged and must therefore exist in the target variable set.
        """
        from .series_ext import ExtElement

        values = {}
        ring_elt = None
        for name, val in bindings.items():
            if name not in self.vars:
                raise UnboundVariableError(f"{name!r} is not a variable of {self.vars}")
            values[name] = val
            if isinstance(val, (MultiPoly, ExtElement)) and ring_elt is None:
                ring_elt = val
        if target_vars is None:
            if ring_elt is not None:
                target_vars = ring_elt.vars
            else:
                target_vars = tuple(v for v in self.vars if v not in values)
        target_vars = check_varset(target_vars)
        if isinstance(ring_elt, ExtElement):
            one = ring_elt.one_like()
        else:
            one = MultiPoly.const(target_vars, 1)
        for v in self.variables_present():
            if v in values:
                val = values[v]
                if not isinstance(val, (MultiPoly, ExtElement)):
                    values[v] = one * rational(val)
                continue
            if v not in target_vars:
                raise UnboundVariableError(f"variable {v!r} is unbound and absent from {target_vars}")
            values[v] = one * MultiPoly.var(target_vars, v)
        for v, val in values.items():
            if getattr(val, "vars", target_vars) != target_vars:
                raise VarSetMismatch(f"binding for {v!r} lives in {val.vars}, expected {target_vars}")

        power_cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in power_cache:
                if e == 1:
                    power_cache[key] = values[self.vars[i]]
                else:
                    power_cache[key] = power(i, e - 1) * values[self.vars[i]]
            return power_cache[key]

        acc = one.zero_like()
        for exps, c in self.sorted_terms():
            term = None
            for i, e in enumerate(exps):
                if e:
                    p = power(i, e)
                    term = p if term is None else term * p
            acc = acc + (one * c if term is None else term * c)
        return acc

    def evaluate(self, values: Mapping) -> Rational:
        total = _mpq(0)
        vals = [rational(values[v]) if v in values else None for v in self.vars]
        for exps, c in self.items():
            t = c
            for v, e in zip(vals, exps):
                if e:
                    if v is None:
                        raise UnboundVariableError("evaluate needs a value for every variable present")
                    t *= v ** e
            total += t
        return total

    def as_univariate(self, var: str) -> list:
        """Coefficients ``[c0, ..., cd]`` in ``var``; each ci is free of ``var``."""
        i = self.vars.index(var)
        shifts, _ = _layout(len(self.vars))
        s = shifts[i]
        d = self.degree(var)
        parts: list = [dict() for _ in range(max(d + 1, 1))]
        for k, c in self.terms.items():
            e = (k >> s) & FIELD
            parts[e][k - (e << s)] = c
        return [MultiPoly(self.vars, p) for p in parts]

    @classmethod
    def from_univariate(cls, coeffs: Sequence["MultiPoly"], var: str) -> "MultiPoly":
        vars = coeffs[0].vars
        x = cls.var(vars, var)
        out = cls.zero(vars)
        for c in reversed(coeffs):
            out = out * x + c
        return out

    # ---- text ---------------------------------------------------------

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"MultiPoly({self.vars}, {format_poly(self)!r})"


def format_poly(p: MultiPoly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for exps, c in p.sorted_terms():
        mono = "*".join(
            v if e == 1 else f"{v}^{e}" for v, e in zip(p.vars, exps) if e
        )
        mag = format_rational(abs(c))
        if mono:
            body = mono if mag == "1" else f"{mag}*{mono}"
        else:
            body = mag
        parts.append(("-" if c < 0 else "+", body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\^)|(\*)|([+-]))")


def parse_poly(text: str, vars) -> MultiPoly:
    """Parse the canonical text form (sum of ``coef*var^e*...`` terms)."""
    vars = check_varset(vars)
    index = {v: i for i, v in enumerate(vars)}
    pos = 0
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial text")
    terms: dict = {}
    sign = 1
    coef = None
    exps = [0] * len(vars)
    expect_term = True
    seen_factor = False

    def flush():
        key = tuple(exps)
        c = terms.get(key, 0) + sign * (coef if coef is not None else 1)
        terms[key] = c

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at {text[pos:pos + 20]!r}")
        pos = m.end()
        num, name, caret, star, pm = m.groups()
        if pm:
            if seen_factor:
                flush()
                sign, coef, exps, seen_factor = 1, None, [0] * len(vars), False
            elif not expect_term:
                raise ValueError(f"dangling operator near {text[max(0, pos - 20):pos]!r}")
            sign = -sign if pm == "-" else sign
            expect_term = True
        elif num:
            c = rational(num)
            coef = c if coef is None else coef * c
            seen_factor, expect_term = True, False
        elif name:
            if name not in index:
                raise ValueError(f"unknown variable {name!r}; expected one of {vars}")
            e = 1
            m2 = re.compile(r"\s*\^\s*(\d+)").match(text, pos)
            if m2:
                e = int(m2.group(1))
                pos = m2.end()
            exps[index[name]] += e
            seen_factor, expect_term = True, False
        elif star:
            if not seen_factor:
                raise ValueError("'*' without a left factor")
            expect_term = True
        elif caret:
            raise ValueError("'^' must follow a variable")
    if not seen_factor:
        raise ValueError("polynomial text ends with an operator")
    flush()
    return MultiPoly.from_dict(vars, {k: c for k, c in terms.items()})


def poly_arith(lhs: MultiPoly, rhs: MultiPoly, op: str) -> MultiPoly:
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown polynomial operation {op!r}")


def poly_exact_div(num: MultiPoly, den: MultiPoly) -> MultiPoly:
    return num.exact_div(den)


def poly_substitute(p: MultiPoly, bindings: Mapping, target_vars=None):
    return p.substitute(bindings, target_vars)


def poly_as_univariate(p: MultiPoly, var: str) -> list:
    if var not in p.vars:
        raise ValueError(f"{var!r} is not a variable of {p.vars}")
    return p.as_univariate(var)


def common_vars(polys: Iterable[MultiPoly]) -> tuple:
    vs = {p.vars for p in polys}
    if len(vs) != 1:
        raise VarSetMismatch(f"polynomials live in different variable sets: {vs}")
    return vs.pop()
