import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stolinv.exact import rational
from stolinv.multipoly import MultiPoly
from stolinv.resultant import (
    CertificateError,
    ResultantError,
    bareiss_resultant,
    nonzero_resultant_certificate,
    poly_gcd_univariate,
    poly_resultant,
    resultant_mod,
    verify_certificate,
)

X = ("x",)
x = MultiPoly.var(X, "x")


def upoly(coeffs):
    return MultiPoly.from_dict(X, {(i,): c for i, c in enumerate(coeffs)})


int_upolys = st.lists(st.integers(-9, 9), min_size=2, max_size=5).filter(lambda c: c[-1] != 0).map(upoly)


def test_known_values():
    assert poly_resultant(x**2 - 2, x - 1, "x").constant_value() == -1
    w, v, s = MultiPoly.gens(("w", "v", "s"))
    assert poly_resultant(s**2 - w, s - v, "s") == v**2 - w
    assert bareiss_resultant(s**2 - w, s - v, "s") == v**2 - w


def test_degenerate_inputs():
    with pytest.raises(ResultantError):
        poly_resultant(MultiPoly.zero(X), x, "x")
    with pytest.raises(ResultantError):
        poly_resultant(MultiPoly.const(X, 3), x, "x")


@settings(max_examples=50, deadline=None)
@given(int_upolys, int_upolys, int_upolys)
def test_multiplicativity(f, g, h):
    r = lambda a, b: poly_resultant(a, b, "x").constant_value()
    assert r(f * g, h) == r(f, h) * r(g, h)


@settings(max_examples=50, deadline=None)
@given(int_upolys, int_upolys)
def test_subresultant_matches_bareiss_and_gcd(f, g):
    r = poly_resultant(f, g, "x")
    assert r == bareiss_resultant(f, g, "x")
    gcd = poly_gcd_univariate(f, g, "x")
    assert (r.constant_value() == 0) == (gcd.degree("x") > 0)


def test_gcd_normalisation():
    g = poly_gcd_univariate((2 * x - 4) * (x + 1), (x - 2) * (3 * x + 5), "x")
    assert g == x - 2
    assert poly_gcd_univariate(-6 * x + 3, MultiPoly.zero(X), "x") == 2 * x - 1


def test_resultant_mod_matches_exact():
    f, g = upoly([3, -1, 4, 1, 5]), upoly([-9, 2, 6, 5])
    exact = int(poly_resultant(f, g, "x").constant_value())
    for p in (101, 10007, 2**31 - 1):
        assert resultant_mod([3, -1, 4, 1, 5], [-9, 2, 6, 5], p) == exact % p


def test_certificate_paths():
    f, g = x**3 + 2 * x + 7, x**2 - 3
    cert = nonzero_resultant_certificate(f, g, "x")
    assert cert.kind == "modular" and cert.nonzero
    assert verify_certificate(f, g, "x", cert)
    exact = nonzero_resultant_certificate(f, g, "x", exact=True)
    assert exact.kind == "exact"
    assert exact.exact_value == poly_resultant(f, g, "x").constant_value()
    assert verify_certificate(f, g, "x", exact)
    d = cert.to_dict()
    assert d["prime"] == str(cert.prime) and d["nonzero"] is True


def test_certificate_on_common_root():
    f, g = (x - 1) * (x + 2), (x - 1) * (x**2 + 1)
    with pytest.raises(CertificateError):
        nonzero_resultant_certificate(f, g, "x", prime_budget=4)
    cert = nonzero_resultant_certificate(f, g, "x", prime_budget=2, exact_fallback=True)
    assert cert.kind == "zero" and not cert.nonzero


def test_certificate_rejects_rationals():
    with pytest.raises(ValueError):
        nonzero_resultant_certificate(x * rational(1, 2) + 1, x**2 + 1, "x")
