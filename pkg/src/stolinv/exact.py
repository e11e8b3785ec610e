"""Exact integers and rationals.

Python ``int`` is the arbitrary-precision integer type.  Rationals are
``gmpy2.mpq`` values, which are kept in lowest terms with a positive
denominator after every operation, so ``==`` is structural equality.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Integral, Rational as _RationalABC

import gmpy2

Rational = type(gmpy2.mpq())

ZERO = gmpy2.mpq(0)
ONE = gmpy2.mpq(1)

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


class ExactArithmeticError(ArithmeticError):
    """Base class for errors raised by the exact layers."""


class DivisionByZeroError(ExactArithmeticError, ZeroDivisionError):
    pass


def rational(value, den=None) -> Rational:
    """Coerce ``value`` (int, str "p/q", Fraction, mpq) to a canonical rational."""
    if den is not None:
        if den == 0:
            raise DivisionByZeroError(f"rational {value}/0")
        return gmpy2.mpq(int(value), int(den))
    if isinstance(value, Rational):
        return value
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, (Integral, Fraction, _RationalABC)) or type(value).__name__ == "mpz":
        if isinstance(value, Fraction):
            return gmpy2.mpq(value.numerator, value.denominator)
        return gmpy2.mpq(value)
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass an int, Fraction or 'p/q' string")
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def parse_rational(text: str) -> Rational:
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise DivisionByZeroError(f"rational literal with zero denominator: {text!r}")
    return gmpy2.mpq(num, den)


def format_rational(x) -> str:
    """``"p/q"``, or ``"p"`` for integers.  Round-trips through parse_rational."""
    x = rational(x)
    if x.denominator == 1:
        return str(int(x.numerator))
    return f"{int(x.numerator)}/{int(x.denominator)}"


def rat_arith(lhs, rhs, op: str) -> Rational:
    lhs, rhs = rational(lhs), rational(rhs)
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        if rhs == 0:
            raise DivisionByZeroError(f"{format_rational(lhs)} / 0")
        return lhs / rhs
    raise ValueError(f"unknown rational operation {op!r}")


def int_gcd(a: int, b: int) -> int:
    """Nonnegative gcd; gcd(0, 0) == 0."""
    return math.gcd(int(a), int(b))


def is_integer(x) -> bool:
    return rational(x).denominator == 1


def to_float(x) -> float:
    """Nearest binary64 value (correctly rounded)."""
    x = rational(x)
    return float(Fraction(int(x.numerator), int(x.denominator)))
