"""Parameter families solving the invariance equation.

A family member is a 6-tuple ``(a, b, c, d, p, q)`` such that
``K(M(x, y), N(x, y)) = K(x, y)`` with ``M``, ``N``, ``K`` the means of
parameters ``(a, b)``, ``(c, d)``, ``(p, q)``.  Theorems ``S``/``G`` cover
Stolarsky/Gini means; ``CorS``/``CorG`` are the special cases where ``K`` is
the arithmetic mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .means import GINI, STOLARSKY, MeanParams

REL = 1e-12


class FamilyError(ValueError):
    pass


def _eq(x, y, tol=REL):
    return math.isclose(x, y, rel_tol=tol, abs_tol=tol)


def _same_pair(x, y, tol=REL):
    """Multiset equality of two 2-element sequences."""
    return (_eq(x[0], y[0], tol) and _eq(x[1], y[1], tol)) or (
        _eq(x[0], y[1], tol) and _eq(x[1], y[0], tol)
    )


def _zero_sum(pair, tol=REL):
    return _eq(pair[0] + pair[1], 0.0, tol)


@dataclass(frozen=True)
class FamilyCase:
    theorem: str
    case_id: str
    mean: str
    params: tuple
    defaults: tuple
    build: Callable
    member: Callable
    complete: Callable
    description: str

    @property
    def label(self) -> str:
        return f"{self.theorem}-{self.case_id}"

    def means(self, t) -> tuple:
        a, b, c, d, p, q = t
        return MeanParams(self.mean, a, b), MeanParams(self.mean, c, d), MeanParams(self.mean, p, q)


def _split(t):
    return (t[0], t[1]), (t[2], t[3]), (t[4], t[5])


# membership predicates -----------------------------------------------------------


def _all_geometric(t, tol=REL):
    ab, cd, pq = _split(t)
    return _zero_sum(ab, tol) and _zero_sum(cd, tol) and _zero_sum(pq, tol)


def _all_equal(t, tol=REL):
    ab, cd, pq = _split(t)
    return _same_pair(ab, cd, tol) and _same_pair(ab, pq, tol)


def _reflected(t, tol=REL):
    ab, cd, pq = _split(t)
    return _same_pair(ab, (-cd[0], -cd[1]), tol) and _zero_sum(pq, tol)


def _gini_iv(t, tol=REL):
    ab, cd, pq = _split(t)
    for u, zero in (pq, pq[::-1]):
        if not _eq(zero, 0.0, tol):
            continue
        for first, v in (ab, ab[::-1]):
            if _eq(first, u + v, tol) and _same_pair(cd, (u - v, -v), tol):
                return True
    return False


def _gini_v(t, tol=REL, swap=False):
    ab, cd, pq = _split(t)
    if swap:
        ab, cd = cd, ab
    if not _zero_sum(cd, tol):
        return False
    for big, w in (ab, ab[::-1]):
        if _eq(big, 3 * w, tol) and _same_pair(pq, (2 * w, 0.0), tol):
            return True
    return False


def _fixed(ab=None, cd=None, pq=None, ab_zero=False, cd_zero=False):
    def member(t, tol=REL):
        x, y, z = _split(t)
        ok = True
        if ab is not None:
            ok &= _same_pair(x, ab, tol)
        if cd is not None:
            ok &= _same_pair(y, cd, tol)
        if pq is not None:
            ok &= _same_pair(z, pq, tol)
        if ab_zero:
            ok &= _zero_sum(x, tol)
        if cd_zero:
            ok &= _zero_sum(y, tol)
        return ok

    return member


def _cor_g_ii(t, tol=REL):
    ab, cd, pq = _split(t)
    if not _same_pair(pq, (1.0, 0.0), tol):
        return False
    for first, v in (ab, ab[::-1]):
        if _eq(first, 1 + v, tol) and _same_pair(cd, (1 - v, -v), tol):
            return True
    return False


# completion of (a, b, c, d) prefixes to full tuples ------------------------------------


def _pq_geometric(ab, cd):
    return (1.0, -1.0)


def _pq_like_ab(ab, cd):
    return ab


def _pq_power_iv(ab, cd):
    u = (sum(ab) + sum(cd)) / 2
    return (u, 0.0)


def _pq_power_v(ab, cd):
    return (sum(ab) / 2, 0.0)


def _pq_power_vi(ab, cd):
    return (sum(cd) / 2, 0.0)


def _const(pq):
    return lambda ab, cd: pq


def _case(theorem, case_id, mean, params, defaults, build, member, complete, description):
    return FamilyCase(theorem, case_id, mean, tuple(params), tuple(defaults), build, member, complete, description)


def _make_cases():
    cases = []
    for thm, mean in (("S", STOLARSKY), ("G", GINI)):
        cases += [
            _case(thm, "i", mean, ("a", "c", "p"), (), lambda a, c, p: (a, -a, c, -c, p, -p),
                  _all_geometric, _pq_geometric, "a+b = c+d = p+q = 0"),
            _case(thm, "ii", mean, ("a", "b"), (), lambda a, b: (a, b, a, b, a, b),
                  _all_equal, _pq_like_ab, "{a,b} = {c,d} = {p,q}"),
            _case(thm, "iii", mean, ("a", "b", "p"), (1.0,), lambda a, b, p=1.0: (a, b, -a, -b, p, -p),
                  _reflected, _pq_geometric, "{a,b} = {-c,-d} and p+q = 0"),
        ]
    cases += [
        _case("G", "iv", GINI, ("u", "v"), (), lambda u, v: (u + v, v, u - v, -v, u, 0.0),
              _gini_iv, _pq_power_iv, "{a,b} = {u+v,v}, {c,d} = {u-v,-v}, {p,q} = {u,0}"),
        _case("G", "v", GINI, ("w",), (), lambda w: (3 * w, w, 1.0, -1.0, 2 * w, 0.0),
              _gini_v, _pq_power_v, "{a,b} = {3w,w}, c+d = 0, {p,q} = {2w,0}"),
        _case("G", "vi", GINI, ("w",), (), lambda w: (1.0, -1.0, 3 * w, w, 2 * w, 0.0),
              lambda t, tol=REL: _gini_v(t, tol, swap=True), _pq_power_vi,
              "a+b = 0, {c,d} = {3w,w}, {p,q} = {2w,0}"),
        _case("CorS", "only", STOLARSKY, (), (), lambda: (2.0, 1.0, 2.0, 1.0, 2.0, 1.0),
              _fixed(ab=(2.0, 1.0), cd=(2.0, 1.0), pq=(2.0, 1.0)), _const((2.0, 1.0)),
              "{a,b} = {c,d} = {2,1} (arithmetic outer mean)"),
        _case("CorG", "i", GINI, (), (), lambda: (1.0, 0.0, 1.0, 0.0, 1.0, 0.0),
              _fixed(ab=(1.0, 0.0), cd=(1.0, 0.0), pq=(1.0, 0.0)), _const((1.0, 0.0)),
              "{a,b} = {c,d} = {1,0}"),
        _case("CorG", "ii", GINI, ("v",), (), lambda v: (1 + v, v, 1 - v, -v, 1.0, 0.0),
              _cor_g_ii, _const((1.0, 0.0)), "{a,b} = {1+v,v}, {c,d} = {1-v,-v}"),
        _case("CorG", "iii", GINI, ("c",), (1.0,), lambda c=1.0: (1.5, 0.5, c, -c, 1.0, 0.0),
              _fixed(ab=(1.5, 0.5), pq=(1.0, 0.0), cd_zero=True), _const((1.0, 0.0)),
              "{a,b} = {3/2,1/2}, c+d = 0"),
        _case("CorG", "iv", GINI, ("a",), (1.0,), lambda a=1.0: (a, -a, 1.5, 0.5, 1.0, 0.0),
              _fixed(cd=(1.5, 0.5), pq=(1.0, 0.0), ab_zero=True), _const((1.0, 0.0)),
              "a+b = 0, {c,d} = {3/2,1/2}"),
    ]
    return {(c.theorem, c.case_id): c for c in cases}


CASES = _make_cases()
THEOREMS = ("S", "G", "CorS", "CorG")


def get_case(theorem: str, case_id: str) -> FamilyCase:
    key = (theorem, str(case_id).lower())
    if key not in CASES:
        known = ", ".join(f"{t} {c}" for t, c in CASES)
        raise FamilyError(f"unknown family {theorem} {case_id}; known: {known}")
    return CASES[key]


def cases_for(theorem: str) -> list:
    return [c for (t, _), c in CASES.items() if t == theorem]


def family_generator(theorem: str, case_id: str, free_params=()) -> tuple:
    """A 6-tuple lying in the family.

    ``free_params`` is either the case's own parameter list (trailing ones may
    be omitted when they have defaults), a prefix ``(a, b, c, d[, p])`` that is
    completed by the family rule, or a full 6-tuple.  Prefixes and full tuples
    are validated and rejected if they are not members.
    """
    case = get_case(theorem, case_id)
    params = tuple(float(x) for x in free_params)
    n, nreq = len(case.params), len(case.params) - len(case.defaults)
    if nreq <= len(params) <= n:
        return tuple(float(x) for x in case.build(*params))
    if 4 <= len(params) <= 6:
        ab, cd = params[0:2], params[2:4]
        pq = case.complete(ab, cd)
        t = tuple(params) + tuple(pq)[len(params) - 4:]
        if not case.member(t):
            raise FamilyError(f"{t} is not a member of family {case.label}: {case.description}")
        return t
    raise FamilyError(
        f"family {case.label} takes parameters {case.params}"
        + (f" ({len(case.defaults)} optional)" if case.defaults else "")
        + f", a 4-5 entry prefix or a full 6-tuple; got {len(params)}"
    )


def in_any_family(t, mean: str, tol: float = 1e-6) -> bool:
    for case in CASES.values():
        if case.mean == mean and case.member(t, tol):
            return True
    return False


def random_member(case: FamilyCase, rng, low=-3.0, high=3.0, min_gap=0.25) -> tuple:
    """Random family member whose three means have |p - q| >= min_gap or p == q."""
    n = len(case.params)
    while True:
        t = case.build(*[float(x) for x in rng.uniform(low, high, size=n)])
        gaps = [abs(t[0] - t[1]), abs(t[2] - t[3]), abs(t[4] - t[5])]
        if all(g == 0 or g >= min_gap for g in gaps):
            return tuple(float(x) for x in t)


# Monte Carlo verification ------------------------------------------------------------

SHARD = 1000
LOG10_RANGE = (-2.0, 2.0)


@dataclass(frozen=True)
class FamilyCheck:
    label: str
    params: tuple
    samples: int
    max_residual: float
    worst: tuple
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_residual <= self.tol


def _shard_worst(mean, t, seed_seq, n):
    import numpy as np

    from .means import MeanParams, relative_residual

    a, b, c, d, p, q = t
    M, N, K = MeanParams(mean, a, b), MeanParams(mean, c, d), MeanParams(mean, p, q)
    rng = np.random.default_rng(seed_seq)
    pts = 10.0 ** rng.uniform(*LOG10_RANGE, size=(n, 2))
    worst, where = 0.0, (1.0, 1.0)
    for x, y in pts.tolist():
        r = relative_residual(K, M, N, x, y)
        if not r <= worst:
            worst, where = r, (x, y)
    return worst, where


def shard_sizes(samples: int) -> list:
    full, rest = divmod(samples, SHARD)
    return [SHARD] * full + ([rest] if rest else [])


def verify_tuple(mean: str, t, samples: int = 10_000, seed: int = 0, tol: float = 1e-12,
                 workers: int = 1, label: str = "") -> FamilyCheck:
    """Max relative invariance residual over log-uniform samples in [1e-2, 1e2]^2.

    Samples are split into fixed-size shards, each with its own substream
    spawned from ``seed``, so the result does not depend on ``workers``.
    """
    import numpy as np

    if samples < 1:
        raise ValueError("samples must be >= 1")
    sizes = shard_sizes(samples)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(mean, tuple(t), s, n) for s, n in zip(seqs, sizes)]
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_shard_worst, *zip(*jobs)))
    else:
        results = [_shard_worst(*j) for j in jobs]
    worst, where = 0.0, (1.0, 1.0)
    for r, w in results:
        if not r <= worst:
            worst, where = r, w
    return FamilyCheck(label, tuple(t), samples, worst, where, tol)


def verify_family(theorem: str, case_id: str, free_params=None, samples: int = 10_000,
                  seed: int = 0, tol: float = 1e-12, workers: int = 1) -> FamilyCheck:
    """Verify one family member; with no ``free_params`` a random member is drawn from ``seed``."""
    import numpy as np

    case = get_case(theorem, case_id)
    if free_params is None:
        t = random_member(case, np.random.default_rng([seed, 7]))
    else:
        t = family_generator(theorem, case_id, free_params)
    return verify_tuple(case.mean, t, samples, seed, tol, workers, case.label)


def random_non_member(mean: str, rng, low=-3.0, high=3.0, min_gap=0.25) -> tuple:
    """Random 6-tuple outside every family (with a 1e-6 margin)."""
    while True:
        t = tuple(float(x) for x in rng.uniform(low, high, size=6))
        gaps = [abs(t[0] - t[1]), abs(t[2] - t[3]), abs(t[4] - t[5])]
        if min(gaps) >= min_gap and not in_any_family(t, mean):
            return t


def residual_at(mean: str, t, x: float = math.e, y: float = 1 / math.e) -> float:
    from .means import MeanParams, relative_residual

    a, b, c, d, p, q = t
    return relative_residual(MeanParams(mean, p, q), MeanParams(mean, a, b), MeanParams(mean, c, d), x, y)
