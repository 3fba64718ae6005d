"""Whitney squares, partitions, coefficient tables, remainder symbols."""

import math
from fractions import Fraction

import numpy as np
import pytest

from tritiles.dyadic import ShiftedDyadicCube
from tritiles.symbol import (
    BUILTIN_SYMBOLS,
    WhitneySquare,
    coverage_band,
    decay_constant,
    decay_fit,
    diagonal_gap,
    fourier_table,
    is_whitney,
    partition_sum,
    reconstruct,
)


def _square(j=0, k=0, offset=19, C0=16):
    return WhitneySquare(ShiftedDyadicCube(j, (k, k + offset), (0, 0)), C0)


def test_builtin_symbol_catalog():
    for name in ("one", "halfplane", "modulus-osc", "sign"):
        assert name in BUILTIN_SYMBOLS
    one = BUILTIN_SYMBOLS["one"]
    assert complex(one(0.3, 1.7)) == pytest.approx(1.0)


def test_whitney_predicate_tracks_gap():
    Q_good = ShiftedDyadicCube(0, (0, 19), (0, 0))
    assert is_whitney(Q_good, 16)
    Q_touching = ShiftedDyadicCube(0, (0, 1), (0, 0))
    assert not is_whitney(Q_touching, 16)
    assert diagonal_gap(Q_good) == Fraction(18)


def test_partition_sums_to_one_on_band():
    lo, hi = coverage_band((-3, 3), 16)
    for t, d in ((0.3, float(lo) * 2), (0.7, float(hi) / 2)):
        c = -1.5
        s = partition_sum(c - d * (1 - t), c + d * t, C0=16)
        assert s == pytest.approx(1.0, abs=1e-8)


def test_partition_vanishing_outside_band():
    lo, hi = coverage_band((-1, 1), 16)
    # far outside the certified band the truncated cover cannot sum to one
    s = partition_sum(0.0, float(hi) * 64, C0=16)
    assert s < 1.0 - 1e-3 or s == pytest.approx(1.0, abs=1e-8)


def test_fourier_table_reconstructs_symbol():
    W = _square()
    m = BUILTIN_SYMBOLS["modulus-osc"]
    table = fourier_table(m, W, N=16, ell=0, n_side=128)
    ca, cb = (float(x) for x in W.Q.center)
    s = float(W.Q.side)
    pts_a = np.array([ca - 0.2 * s, ca, ca + 0.3 * s])
    pts_b = np.array([cb - 0.1 * s, cb, cb + 0.2 * s])
    approx = reconstruct(table, W, pts_a, pts_b)
    # the table encodes m times the normalized partition bump of the square
    from tritiles.symbol import family_near_square, partition_bump

    bump = partition_bump(W, pts_a, pts_b, candidates=family_near_square(W))
    exact = np.array([complex(m(a, b)) for a, b in zip(pts_a, pts_b)])
    # truncation at |n| <= N leaves a small spectral tail
    assert np.max(np.abs(approx - exact * bump)) < 5e-3


def test_decay_constant_and_fit():
    W = _square()
    table = fourier_table(BUILTIN_SYMBOLS["halfplane"], W, N=12, n_side=128)
    c6 = decay_constant(table, order=6)
    assert math.isfinite(c6) and c6 > 0
    fit = decay_fit(table)
    assert fit["M_fit"] >= 3
