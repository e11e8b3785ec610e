import numpy as np
import pytest

from stolinv.families import (
    CASES,
    FamilyError,
    family_generator,
    get_case,
    in_any_family,
    random_member,
    random_non_member,
    residual_at,
    verify_family,
    verify_tuple,
)
from stolinv.means import GINI, STOLARSKY


@pytest.mark.parametrize("theorem,case,params,want", [
    ("S", "iii", [2, 5], (2, 5, -2, -5, 1, -1)),
    ("G", "iv", [2, 1], (3, 1, 1, -1, 2, 0)),
    ("CorS", "only", [], (2, 1, 2, 1, 2, 1)),
    ("G", "v", [1], (3, 1, 1, -1, 2, 0)),
    ("CorG", "ii", [0.5], (1.5, 0.5, 0.5, -0.5, 1, 0)),
    ("S", "i", [1, 2, 3], (1, -1, 2, -2, 3, -3)),
])
def test_generator(theorem, case, params, want):
    assert family_generator(theorem, case, params) == tuple(float(x) for x in want)


def test_prefix_completion_and_validation():
    assert family_generator("S", "ii", [2, 5, 5, 2]) == (2, 5, 5, 2, 2, 5)
    assert family_generator("G", "iv", [3, 1, 1, -1]) == (3, 1, 1, -1, 2, 0)
    with pytest.raises(FamilyError, match="not a member"):
        family_generator("S", "ii", [2, 5, 2, 4])
    with pytest.raises(FamilyError, match="not a member"):
        family_generator("S", "iii", [2, 5, -2, -5, 1, 1])


def test_unknown_case_and_arity():
    with pytest.raises(FamilyError, match="unknown family"):
        get_case("S", "iv")
    with pytest.raises(FamilyError):
        family_generator("G", "iv", [1])


def test_membership_is_order_insensitive():
    assert CASES[("S", "iii")].member((5, 2, -2, -5, -1, 1))
    assert CASES[("G", "v")].member((1, 3, 4, -4, 0, 2))
    assert not CASES[("G", "v")].member((1, 3, 4, -4, 0, 3))


def test_random_members_satisfy_predicates():
    rng = np.random.default_rng(3)
    for case in CASES.values():
        for _ in range(20):
            t = random_member(case, rng)
            assert case.member(t)
            for a, b in ((t[0], t[1]), (t[2], t[3]), (t[4], t[5])):
                assert a == b or abs(a - b) >= 0.25


def test_sharding_is_worker_independent():
    one = verify_family("G", "iv", [2, 1], samples=2500, seed=5, workers=1)
    two = verify_family("G", "iv", [2, 1], samples=2500, seed=5, workers=2)
    assert one == two
    assert one.samples == 2500 and one.ok


def test_breach_reports_worst_sample():
    chk = verify_tuple(STOLARSKY, (2, 1, 3, 1, 2, 1), samples=200, seed=0)
    assert not chk.ok
    assert chk.max_residual > 1e-6
    assert chk.worst != (1.0, 1.0)


def test_negative_controls():
    rng = np.random.default_rng(11)
    for mean in (STOLARSKY, GINI):
        for _ in range(100):
            t = random_non_member(mean, rng)
            assert not in_any_family(t, mean)
            assert residual_at(mean, t) >= 1e-6
