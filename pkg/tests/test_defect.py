import pytest

from stolinv.defect import build_defect_series, coefficient, raw_ring, reparam_ring, ring_for
from stolinv.exact import rational
from stolinv.multipoly import MultiPoly, parse_poly
from stolinv.series_ext import ParityError

RAW = ("a", "b", "c", "d", "p", "q")


@pytest.fixture(scope="module")
def raw7():
    return build_defect_series(7, "raw")


def test_low_orders_raw(raw7):
    assert raw7[0].is_zero() and raw7[1].is_zero() and raw7[3].is_zero() and raw7[5].is_zero()
    c2 = parse_poly("1/12*a + 1/12*b + 1/12*c + 1/12*d - 1/6*p - 1/6*q", RAW)
    assert raw7[2] == c2


def test_odd_orders_vanish(F13):
    assert F13.order == 12
    for n in range(1, 13, 2):
        assert F13[n].is_zero(), n


def test_reparam_c2_vanishes(F13):
    assert F13[2].is_zero()


def test_raw_coefficients_map_to_reparam(raw7, F13):
    ring = reparam_ring()
    bind = {"a": ring.a, "b": ring.b, "c": ring.c, "d": ring.d, "p": ring.p, "q": ring.q}
    for n in (2, 4, 6):
        assert raw7[n].substitute(bind).parity_project() == F13[n]


def test_term_counts(F13):
    assert [len(F13[n]) for n in (4, 6, 8, 10, 12)] == [4, 11, 23, 42, 72]


def test_truncation_order_and_lookup():
    F = build_defect_series(5, "reparam")
    assert F.order == 4
    assert coefficient(F, 4) == F[4]
    with pytest.raises(ValueError):
        coefficient(F, 5)
    with pytest.raises(ValueError):
        build_defect_series(2)
    with pytest.raises(ValueError):
        ring_for("polar")


def test_symmetry_of_raw_c4():
    c4 = build_defect_series(5, "raw")[4]
    swap = {"a": MultiPoly.var(RAW, "b"), "b": MultiPoly.var(RAW, "a")}
    assert c4.substitute(swap, RAW) == c4
    outer = {"p": MultiPoly.var(RAW, "q"), "q": MultiPoly.var(RAW, "p")}
    assert c4.substitute(outer, RAW) == c4


def test_parity_failure_names_the_stage():
    # an asymmetric inner pair leaves a radical in the inner mean series
    ring = reparam_ring()
    bad = ring.__class__("bad", ring.vars, ring.a, ring.b + ring.ext.radical(2), ring.c, ring.d,
                         ring.p, ring.q, ring.ext)
    with pytest.raises(ParityError, match="E_k\\(a, b"):
        build_defect_series(5, ring=bad)


def test_raw_ring_generators():
    ring = raw_ring()
    assert ring.a == MultiPoly.var(RAW, "a") and ring.ext is None
    assert ring.one() == MultiPoly.const(RAW, rational(1))
