"""Interval unions and the exact dyadic maximal level set."""

from fractions import Fraction

import pytest

from tritiles.modelform import exceptional_set, maximal_level_set
from tritiles.sets import IntervalUnion


def test_union_merges_touching_parts():
    E = IntervalUnion.from_intervals([(0, 1), (1, 2), (3, 4)])
    assert E.parts == ((Fraction(0), Fraction(2)), (Fraction(3), Fraction(4)))
    assert E.measure() == 3


def test_set_algebra():
    A = IntervalUnion.from_intervals([(0, 2)])
    B = IntervalUnion.from_intervals([(1, 3)])
    assert A.intersect(B).measure() == 1
    assert A.union(B).measure() == 3
    C = A.complement_within(-1, 3)
    assert C.measure() == 2
    assert C.contains_point(Fraction(-1, 2)) and not C.contains_point(1)
    assert A.distance_to_point(5) == 3


def _brute_level_set(E, lam, j_range, k_range):
    """Union of all standard dyadic intervals with density above lam."""
    hits = IntervalUnion.empty()
    for j in j_range:
        length = Fraction(2) ** j
        for k in k_range:
            piece = IntervalUnion(((length * k, length * (k + 1)),))
            if E.intersect(piece).measure() > lam * length:
                hits = hits.union(piece)
    return hits


def test_maximal_level_set_matches_bruteforce():
    E = IntervalUnion.from_intervals(
        [(0, Fraction(1, 2)), (Fraction(3, 4), 1), (2, Fraction(9, 4))]
    )
    for lam in (Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(7, 8)):
        got = maximal_level_set(E, lam)
        brute = _brute_level_set(E, lam, range(-6, 8), range(-64, 256))
        assert got.parts == brute.parts


def test_maximal_level_set_edge_cases():
    E = IntervalUnion.from_intervals([(0, 1)])
    assert maximal_level_set(E, 1).parts == ()
    with pytest.raises(ValueError):
        maximal_level_set(E, 0)
    # non-dyadic endpoints are rejected rather than silently approximated
    with pytest.raises(ValueError):
        maximal_level_set(IntervalUnion.from_intervals([(0, Fraction(1, 3))]), Fraction(1, 2))


def test_exceptional_set_majority_and_budget():
    sets = [
        IntervalUnion.from_intervals([(0, 4)]),
        IntervalUnion.from_intervals([(0, 1), (2, Fraction(5, 2))]),
        IntervalUnion.from_intervals([(Fraction(1, 2), Fraction(3, 2))]),
    ]
    Omega, pruned, report = exceptional_set(sets, C=2**6, anchor=2)
    assert report["major"]  # 2|E'| >= |E|
    assert report["budget_ok"]
    assert pruned.measure() <= sets[1].measure()
    assert Omega.measure() == report["omega_measure"]
