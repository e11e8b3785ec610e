"""Resultants, univariate gcds and modular nonvanishing certificates.

Polynomials are viewed as univariate in one variable with coefficients that
are polynomials in the remaining variables.  The main resultant routine is the
subresultant polynomial remainder sequence, which keeps every intermediate in
the coefficient ring via exact divisions.  ``bareiss_resultant`` evaluates the
Sylvester determinant fraction-free and serves as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import gmpy2

from .exact import ExactArithmeticError, format_rational
from .multipoly import MultiPoly


class ResultantError(ExactArithmeticError, ValueError):
    pass


class CertificateError(ExactArithmeticError):
    pass


def _trim(coeffs: list) -> list:
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def _deg(coeffs) -> int:
    return len(coeffs) - 1


def _prem(A: list, B: list) -> list:
    """Pseudo-remainder: lc(B)^(degA-degB+1) * A mod B."""
    R = list(A)
    dB = _deg(B)
    lb = B[-1]
    e = _deg(A) - dB + 1
    while R and _deg(R) >= dB:
        lr = R[-1]
        shift = _deg(R) - dB
        R = [c * lb for c in R]
        for i, b in enumerate(B):
            R[i + shift] = R[i + shift] - lr * b
        R.pop()
        _trim(R)
        e -= 1
    if e > 0:
        f = lb ** e
        R = [c * f for c in R]
    return R


def subresultant_resultant(A: list, B: list):
    """Resultant of two coefficient lists (low degree first) over a domain."""
    A, B = _trim(list(A)), _trim(list(B))
    if not A or not B:
        raise ResultantError("resultant of a zero polynomial")
    one = A[0].one_like()
    if _deg(A) == 0 and _deg(B) == 0:
        return one
    if _deg(A) == 0:
        return A[0] ** _deg(B)
    if _deg(B) == 0:
        return B[0] ** _deg(A)
    s = 1
    if _deg(A) < _deg(B):
        if _deg(A) % 2 and _deg(B) % 2:
            s = -1
        A, B = B, A
    g = one
    h = one
    while True:
        delta = _deg(A) - _deg(B)
        if _deg(A) % 2 and _deg(B) % 2:
            s = -s
        R = _prem(A, B)
        A = B
        if not R:
            return one.zero_like()
        div = g * h ** delta
        B = [c.exact_div(div) for c in R]
        g = A[-1]
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = (g ** delta).exact_div(h ** (delta - 1))
        if _deg(B) == 0:
            dA = _deg(A)
            if dA == 0:
                return one * s
            lb = B[0]
            if dA == 1:
                h = lb
            else:
                h = (lb ** dA).exact_div(h ** (dA - 1))
            return h * s if s == 1 else -h


def sylvester_matrix(A: list, B: list) -> list:
    m, n = _deg(A), _deg(B)
    zero = A[0].zero_like()
    size = m + n
    rows = []
    for i in range(n):
        row = [zero] * size
        for j, c in enumerate(reversed(A)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for j, c in enumerate(reversed(B)):
            row[i + j] = c
        rows.append(row)
    return rows


def bareiss_determinant(M: list):
    n = len(M)
    if n == 0:
        raise ResultantError("determinant of an empty matrix")
    M = [list(r) for r in M]
    one = M[0][0].one_like()
    sign = 1
    prev = one
    for k in range(n - 1):
        if M[k][k].is_zero():
            for i in range(k + 1, n):
                if not M[i][k].is_zero():
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return one.zero_like()
        pivot = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (pivot * M[i][j] - M[i][k] * M[k][j]).exact_div(prev)
            M[i][k] = one.zero_like()
        prev = pivot
    det = M[n - 1][n - 1]
    return det if sign == 1 else -det


def _univariate_pair(p: MultiPoly, q: MultiPoly, var: str):
    if p.vars != q.vars:
        raise ResultantError(f"variable sets differ: {p.vars} vs {q.vars}")
    if p.is_zero() or q.is_zero():
        raise ResultantError("resultant of a zero polynomial")
    A, B = p.as_univariate(var), q.as_univariate(var)
    if _deg(A) < 1 or _deg(B) < 1:
        raise ResultantError(f"both polynomials need positive degree in {var!r}")
    return A, B


def poly_resultant(p: MultiPoly, q: MultiPoly, var: str) -> MultiPoly:
    """Sylvester resultant of p and q with respect to ``var``."""
    A, B = _univariate_pair(p, q, var)
    return subresultant_resultant(A, B)


def bareiss_resultant(p: MultiPoly, q: MultiPoly, var: str) -> MultiPoly:
    A, B = _univariate_pair(p, q, var)
    return bareiss_determinant(sylvester_matrix(A, B))


# ---- univariate rational polynomials ---------------------------------------


def _rat_coeffs(p: MultiPoly, var: str) -> list:
    others = [v for v in p.variables_present() if v != var]
    if others:
        raise ValueError(f"polynomial is not univariate in {var!r}: also contains {others}")
    return [c.constant_value() for c in p.as_univariate(var)] if p else []


def _rat_trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _rat_rem(a: list, b: list) -> list:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and a:
        f = a[-1] / lb
        sh = len(a) - 1 - db
        for i, c in enumerate(b):
            a[sh + i] -= f * c
        a.pop()
        _rat_trim(a)
    return a


def poly_gcd_univariate(p: MultiPoly, q: MultiPoly, var: str) -> MultiPoly:
    """Primitive integer gcd (positive leading coefficient) of univariate polys."""
    if p.vars != q.vars:
        raise ResultantError("variable sets differ")
    a, b = _rat_trim(_rat_coeffs(p, var)), _rat_trim(_rat_coeffs(q, var))
    while b:
        a, b = b, _rat_rem(a, b)
    if not a:
        return MultiPoly.zero(p.vars)
    x = MultiPoly.var(p.vars, var)
    g = MultiPoly.zero(p.vars)
    for c in reversed(a):
        g = g * x + c
    g = g.primitive()
    if a[-1] < 0:
        g = -g
    return g


# ---- modular certificate ----------------------------------------------------


def _int_coeffs(p: MultiPoly, var: str) -> list:
    coeffs = _rat_coeffs(p, var)
    if any(c.denominator != 1 for c in coeffs):
        raise ValueError("certificate inputs must have integer coefficients")
    return [int(c) for c in coeffs]


def resultant_mod(a: list, b: list, m: int) -> int:
    """Resultant of integer coefficient lists (low first) modulo prime m.

    Both leading coefficients must be nonzero mod m.
    """
    a = [x % m for x in a]
    b = [x % m for x in b]
    while a and a[-1] == 0:
        a.pop()
    while b and b[-1] == 0:
        b.pop()
    res = 1
    while len(b) > 1:
        da, db = len(a) - 1, len(b) - 1
        # a mod b
        inv = pow(b[-1], -1, m)
        r = list(a)
        while len(r) - 1 >= db and r:
            f = r[-1] * inv % m
            sh = len(r) - 1 - db
            for i, c in enumerate(b):
                r[sh + i] = (r[sh + i] - f * c) % m
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        if not r:
            return 0
        dr = len(r) - 1
        if da % 2 and db % 2:
            res = -res
        res = res * pow(b[-1], da - dr, m) % m
        a, b = b, r
    if not b:
        return 0
    return res * pow(b[0], len(a) - 1, m) % m


@dataclass
class Certificate:
    """Witness that resultant(p, q) is nonzero (or the exact value)."""

    kind: str  # "modular" | "exact" | "zero"
    nonzero: bool
    prime: int | None = None
    residue: int | None = None
    exact_value: object = None
    primes_tried: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "nonzero": self.nonzero, "primes_tried": list(self.primes_tried)}
        if self.prime is not None:
            out["prime"] = str(self.prime)
            out["residue"] = str(self.residue)
        if self.exact_value is not None:
            out["exact_value"] = format_rational(self.exact_value)
        return out


def verify_certificate(p: MultiPoly, q: MultiPoly, var: str, cert: Certificate) -> bool:
    if cert.kind == "modular":
        a, b = _int_coeffs(p, var), _int_coeffs(q, var)
        m = cert.prime
        if not gmpy2.is_prime(m) or a[-1] % m == 0 or b[-1] % m == 0:
            return False
        r = resultant_mod(a, b, m)
        return r == cert.residue and r != 0
    if cert.kind in ("exact", "zero"):
        value = poly_resultant(p, q, var).constant_value()
        return value == cert.exact_value and cert.nonzero == (value != 0)
    return False


def nonzero_resultant_certificate(
    p: MultiPoly,
    q: MultiPoly,
    var: str,
    *,
    prime_budget: int = 16,
    start: int = 2**31,
    exact: bool = False,
    exact_fallback: bool = False,
) -> Certificate:
    """Prove resultant(p, q, var) != 0 by a single prime, or compute it exactly.

    When no prime in the budget gives a nonzero residue, the resultant may be
    zero; with ``exact_fallback`` the exact value is then computed, otherwise
    :class:`CertificateError` is raised.
    """
    a, b = _int_coeffs(p, var), _int_coeffs(q, var)
    if len(a) < 2 or len(b) < 2:
        raise ResultantError(f"both polynomials need positive degree in {var!r}")
    if exact:
        value = poly_resultant(p, q, var).constant_value()
        return Certificate("exact" if value else "zero", bool(value), exact_value=value)
    tried = []
    m = start
    while len(tried) < prime_budget:
        m = int(gmpy2.next_prime(m))
        tried.append(m)
        if a[-1] % m == 0 or b[-1] % m == 0:
            continue
        r = resultant_mod(a, b, m)
        if r:
            return Certificate("modular", True, prime=m, residue=r, primes_tried=tried)
    if exact_fallback:
        value = poly_resultant(p, q, var).constant_value()
        return Certificate("exact" if value else "zero", bool(value), exact_value=value, primes_tried=tried)
    raise CertificateError(
        f"no prime among {len(tried)} tried certifies a nonzero resultant; "
        "rerun with exact computation"
    )
