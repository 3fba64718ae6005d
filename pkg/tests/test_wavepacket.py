"""Bump profiles, wave packets and pairings."""

import numpy as np
import pytest

from tritiles.bumps import PlateauBump, smooth_step
from tritiles.dyadic import DyadicInterval
from tritiles.tiles import Tile
from tritiles.wavepacket import (
    ResolutionError,
    SampledFunction,
    WavePacket,
    default_profile,
    make_wave_packet,
    pair,
    pair_packets,
    verify_decay,
)


def test_smooth_step_endpoints():
    assert smooth_step(-0.5) == 0.0
    assert smooth_step(1.5) == 1.0
    mid = smooth_step(0.5)
    assert 0.0 < mid < 1.0


def test_plateau_bump_shape():
    eta = PlateauBump(0.30, 0.40)
    assert eta(0.0) == pytest.approx(1.0)
    assert eta(0.29) == pytest.approx(1.0)
    assert eta(0.41) == 0.0
    v = eta(0.35)
    assert 0.0 < v < 1.0
    assert eta(-0.35) == pytest.approx(v)


def _packet(jI=0, kI=0, kw=3):
    tile = Tile(DyadicInterval(jI, kI), DyadicInterval(-jI, kw))
    return make_wave_packet(tile)


def test_packet_l2_normalized():
    wp = _packet()
    x0, x1 = wp.numerical_support
    dx = wp.nyquist_dx() / 4
    xs = np.arange(x0, x1, dx)
    vals = wp.evaluate(xs)
    norm_sq = float(np.sum(np.abs(vals) ** 2) * dx)
    assert norm_sq == pytest.approx(1.0, rel=1e-6)


def test_packet_frequency_support_inside_omega():
    wp = _packet(jI=-2, kI=5, kw=7)
    lo, hi = wp.freq_support
    omega = wp.tile.omega
    assert float(omega.left) <= lo <= hi <= float(omega.right)


def test_self_pairing_is_one():
    wp = _packet()
    x0, x1 = wp.numerical_support
    f = SampledFunction.from_callable(wp.evaluate, x0, x1, wp.nyquist_dx() / 4)
    assert abs(pair(f, wp) - 1.0) < 1e-6


def test_disjoint_frequency_pairing_vanishes():
    a = _packet(kw=0)
    b = _packet(kw=5)
    assert abs(pair_packets(a, b)) < 1e-10


def test_resolution_guard():
    tile = Tile(DyadicInterval(0, 0), DyadicInterval(0, 100))
    with pytest.raises(ResolutionError):
        make_wave_packet(tile, dx=0.25)


def test_spatial_decay_certificate():
    wp = _packet()
    # verify_decay returns the worst observed constant for M-th order decay
    c = verify_decay(wp, M=3, n_samples=4097)
    assert np.isfinite(c) and c > 0
