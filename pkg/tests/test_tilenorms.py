"""Size, energy, and the size-energy interpolation bound."""

from fractions import Fraction

import math

import pytest

from tritiles.dyadic import DyadicInterval
from tritiles.sets import IntervalUnion
from tritiles.tilenorms import (
    CoefficientField,
    combinatorial_bound,
    cutoff_power_integral,
    energy_bruteforce,
    energy_greedy,
    size,
    size_jn,
    size_oracle,
)
from tritiles.tiles import generate_rank1_collection


def _collection(seed=11, count=6):
    return generate_rank1_collection(seed=seed, scale_range=(-4, 0),
                                     window=(0, 32), count=count, C0=16,
                                     require_sparse=False, n_anchors=2)


def test_size_matches_exhaustive_oracle():
    coll = _collection()
    field = CoefficientField.random(coll, seed=1)
    for i in (1, 2, 3):
        s = size(field, coll, i)
        o = size_oracle(field, coll, i)
        assert abs(s - o) <= 1e-12 * max(s, o, 1.0)


def test_size_jn_band():
    coll = _collection(seed=13)
    field = CoefficientField.random(coll, seed=2)
    for i in (1, 2, 3):
        s = size(field, coll, i)
        jn = size_jn(field, coll, i)
        if s > 0:
            assert 1 / 8 <= jn / s <= 8


def test_energy_greedy_half_approximation():
    for seed in range(5):
        coll = _collection(seed=seed + 20, count=5)
        field = CoefficientField.random(coll, seed=seed)
        for i in (1, 2, 3):
            g, _ = energy_greedy(field, coll, i)
            b = energy_bruteforce(field, coll, i)
            assert g >= 0.5 * b - 1e-12
            assert g <= b + 1e-12


def test_energy_scales_linearly_in_coefficients():
    coll = _collection(seed=31, count=5)
    field = CoefficientField.random(coll, seed=3)
    doubled = field.scaled(2.0, 1)
    base = energy_greedy(field, coll, 1)[0]
    assert energy_greedy(doubled, coll, 1)[0] == pytest.approx(2 * base, rel=1e-12)


def test_cutoff_power_integral_monotone_in_overlap():
    I = DyadicInterval(0, 0)
    near = IntervalUnion.from_intervals([(0, 1)])
    far = IntervalUnion.from_intervals([(100, 101)])
    v_near = cutoff_power_integral(I, near, M=5)
    v_far = cutoff_power_integral(I, far, M=5)
    assert v_near > v_far > 0


def test_combinatorial_bound_structure():
    coll = _collection(seed=41, count=6)
    field = CoefficientField.random(coll, seed=4)
    lhs, rhs, ratio, parts = combinatorial_bound(
        field, coll, (Fraction(1, 3),) * 3)
    assert math.isfinite(lhs) and math.isfinite(rhs)
    assert rhs > 0 and ratio == lhs / rhs
    for i in (1, 2, 3):
        assert set(parts[i]) == {"size", "energy"}
