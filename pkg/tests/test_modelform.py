"""Exponent polytope, step functions, model form identities."""

import random
from fractions import Fraction

import numpy as np
import pytest

from tritiles.modelform import (
    VERTICES_PRIMARY,
    StepFunction,
    bht_product_form,
    classify,
    continuous_form,
    in_polytope,
    lambda_sharp,
    pair_step,
    paired_collections,
    pprime_collection,
    signed_indicator,
)
from tritiles.sets import IntervalUnion
from tritiles.symbol import BUILTIN_SYMBOLS
from tritiles.tiles import maximal_tree
from tritiles.wavepacket import SampledFunction, make_wave_packet


def test_classify_examples():
    assert classify((Fraction(1, 4),) * 4) == "good"
    assert classify((1, Fraction(1, 2), 1, Fraction(-3, 2))) == "bad(4)"
    assert classify((1, Fraction(-1, 2), 0, Fraction(1, 2))) == "bad(2)"
    assert classify((2, -1, 0, 0)) == "inadmissible"  # coordinate above 1
    assert classify((1, 1, -1, -1)) == "inadmissible"  # two negatives
    assert classify((0, 0, 0, 0)) == "inadmissible"  # wrong sum


def test_polytope_interior_membership():
    center = (Fraction(1, 4),) * 4
    assert in_polytope(center)
    for v in VERTICES_PRIMARY:
        # vertices sit on the boundary, outside the open interior,
        # but pulling them toward the center lands inside D'
        assert not in_polytope(v, region="D'")
        near = tuple(Fraction(9, 10) * x + Fraction(1, 10) * c
                     for x, c in zip(v, center))
        assert in_polytope(near, region="D'")
    assert not in_polytope((2, -1, 0, 0))
    with pytest.raises(ValueError):
        in_polytope((0, 0, 0, 0))


def test_step_function_basics():
    E = IntervalUnion.from_intervals([(0, 1), (2, Fraction(5, 2))])
    f = StepFunction.indicator(E)
    assert f.norm2() == pytest.approx(float(E.measure()) ** 0.5)
    assert complex(f.hat(0.0)) == pytest.approx(float(E.measure()))
    assert float(np.abs(f.sample(0.5))) == pytest.approx(1.0)
    assert float(np.abs(f.sample(1.5))) == 0.0
    with pytest.raises(ValueError):
        StepFunction.indicator(E, [2.0, 1.0])  # signs above modulus one


def test_pair_step_matches_sampled_pairing():
    from tritiles.dyadic import DyadicInterval
    from tritiles.tiles import Tile

    wp = make_wave_packet(Tile(DyadicInterval(0, 0), DyadicInterval(0, 2)))
    E = IntervalUnion.from_intervals([(Fraction(-1, 2), Fraction(3, 2))])
    f = StepFunction.indicator(E)
    direct = pair_step(f, wp)
    x0, x1 = wp.numerical_support
    from tritiles.wavepacket import pair

    # sampled pairings converge to the closed-form value as the grid is
    # refined (first order, limited by the indicator's jumps)
    errs = []
    for refine in (8, 32, 128):
        dx = wp.nyquist_dx() / refine
        sampled = SampledFunction.from_callable(
            lambda x: f.sample(x), x0, x1, dx
        )
        errs.append(abs(direct - pair(sampled, wp)))
    assert errs[-1] < errs[0] / 4
    assert errs[-1] < 1e-3


def test_lambda_sharp_orders_agree():
    P, Q, _ = paired_collections(seed=21, gap=3, n_q=2, translates=2)
    rng = random.Random(5)
    fs = [signed_indicator(E, rng) for E in
          [IntervalUnion.from_intervals([(0, 2)])] * 4]
    val, info = lambda_sharp(P, Q, *fs, gap=3, with_info=True)
    assert info["rel_dev"] < 1e-8
    assert info["n_pairs"] > 0


def test_pprime_equivalence_small():
    P, Q, _ = paired_collections(seed=9, gap=2, n_q=2, translates=2)
    top = max(Q, key=lambda t: t.I.length)
    T = maximal_tree(Q, top, 1)
    coll, report = pprime_collection(T, P, gap=2)
    assert report["equivalence_holds"]
    assert report["pairs_checked"] == len(P)


def test_continuous_form_oracle():
    n, dx = 1024, 1.0 / 32
    rng = np.random.default_rng(2)
    xs = np.arange(n) * dx - n * dx / 2

    def band_limited():
        modes = rng.integers(-10, 11, size=4)
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        vals = sum(a * np.exp(2j * np.pi * k / (n * dx) * xs)
                   for a, k in zip(amps, modes))
        env = np.exp(-((xs / 4.0) ** 2))
        return SampledFunction(xs[0], dx, vals * env)

    fs = [band_limited() for _ in range(4)]
    one = BUILTIN_SYMBOLS["one"]
    lhs = continuous_form(one, one, fs, window=1.0)
    rhs = dx * np.sum(np.prod([f.values for f in fs], axis=0))
    scale = max(abs(lhs), abs(rhs))
    assert abs(lhs - rhs) / scale < 1e-6

    half = BUILTIN_SYMBOLS["halfplane"]
    lhs_h = continuous_form(half, one, fs, window=1.0)
    rhs_h = bht_product_form(fs, window=1.0)
    scale_h = max(abs(lhs_h), abs(rhs_h), 1e-300)
    assert abs(lhs_h - rhs_h) / scale_h < 1e-8
