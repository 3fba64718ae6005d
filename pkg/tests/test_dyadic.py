"""Exact grid geometry: intervals, cubes, covers, sparseness."""

from fractions import Fraction

import pytest

from tritiles.dyadic import (
    DyadicInterval,
    RationalInterval,
    ShiftedDyadicCube,
    enumerate_grid,
    is_sparse,
    split_sparse,
    standard_dyadic_cover,
)


def test_interval_endpoints_standard():
    I = DyadicInterval(-2, 5)
    assert I.length == Fraction(1, 4)
    assert I.left == Fraction(5, 4)
    assert I.right == Fraction(3, 2)
    assert I.center == Fraction(11, 8)


def test_interval_shift_sign_alternates_with_scale():
    even = DyadicInterval(0, 0, Fraction(1, 3))
    odd = DyadicInterval(1, 0, Fraction(1, 3))
    assert even.left == Fraction(1, 3)
    assert odd.left == -Fraction(2, 3)


def test_bad_shift_rejected():
    with pytest.raises(ValueError):
        DyadicInterval(0, 0, Fraction(1, 2))


def test_same_scale_grid_partitions():
    intervals = [DyadicInterval(-3, k, Fraction(1, 3)) for k in range(-8, 16)]
    lefts = sorted(I.left for I in intervals)
    for a, b in zip(intervals[:-1], intervals[1:]):
        assert a.right == b.left
    assert lefts[0] == intervals[0].left


def test_dilate_center_and_length():
    I = DyadicInterval(2, 3)
    D = I.dilate(Fraction(5, 2))
    assert D.center == I.center
    assert D.length == Fraction(5, 2) * I.length


def test_rational_interval_predicates():
    A = RationalInterval(0, 4)
    B = RationalInterval(1, 2)
    assert A.contains(B) and not B.contains(A)
    assert A.overlaps(B)
    assert not RationalInterval(0, 1).overlaps(RationalInterval(1, 2))
    assert RationalInterval(0, 1).distance_to_point(3) == 2


def test_standard_cover_contains_and_scales():
    I = DyadicInterval(-4, -7)
    J = standard_dyadic_cover(I, 8)
    assert J.length == 8 * I.length
    assert J.as_rational().contains(I.as_rational())
    with pytest.raises(ValueError):
        standard_dyadic_cover(I, 3)
    with pytest.raises(ValueError):
        standard_dyadic_cover(DyadicInterval(0, 0, Fraction(1, 3)), 2)


def test_enumerate_grid_meets_window():
    window = [(0, 1), (0, 1)]
    cubes = enumerate_grid((Fraction(1, 3), Fraction(1, 3)), [-1, 0], window)
    assert cubes
    for Q in cubes:
        for comp, (lo, hi) in zip(Q.components, window):
            assert comp.left <= hi and comp.right > lo


def test_sparseness_and_split():
    close = [
        ShiftedDyadicCube(0, (0, 0), (0, 0)),
        ShiftedDyadicCube(0, (1, 1), (0, 0)),
    ]
    assert not is_sparse(close)
    far = [
        ShiftedDyadicCube(0, (0, 0), (0, 0)),
        ShiftedDyadicCube(0, (2**31, 2**31), (0, 0)),
        ShiftedDyadicCube(-31, (5, 5), (0, 0)),
    ]
    assert is_sparse(far)
    # repeated identical cube is not a violating pair
    assert is_sparse([close[0], close[0]])

    mixed = close + far
    classes = split_sparse(mixed)
    assert sum(len(c) for c in classes) == len(mixed)
    for c in classes:
        assert is_sparse(c)


def test_cube_components_and_center():
    Q = ShiftedDyadicCube(1, (2, -3), (Fraction(2, 3), 0))
    assert Q.side == 2
    assert Q.component(0).sigma == Fraction(2, 3)
    assert Q.center == (Q.component(0).center, Q.component(1).center)
