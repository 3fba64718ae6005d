"""Tile orders, rank-1 collections, trees and their dichotomies."""

from fractions import Fraction

import pytest

from tritiles.dyadic import DyadicInterval
from tritiles.tiles import (
    Tile,
    Tree,
    check_rank1,
    generate_rank1_collection,
    generate_tree_collection,
    maximal_tree,
    tile_le,
    tile_lesssim,
    tile_lesssim_prime,
    tile_lt,
    tile_order,
    tree_frequency_dichotomy,
    tritile_collection_sparse,
)


def _tile(jI, kI, kw, sigma=Fraction(0)):
    return Tile(DyadicInterval(jI, kI), DyadicInterval(-jI, kw, sigma))


def test_tile_validation():
    with pytest.raises(ValueError):
        Tile(DyadicInterval(0, 0), DyadicInterval(1, 0))
    with pytest.raises(ValueError):
        Tile(DyadicInterval(0, 0, Fraction(1, 3)), DyadicInterval(0, 0))


def test_order_basic_example():
    # small tile inside a big one, frequencies nested the other way
    big = _tile(2, 0, 0)
    small = _tile(0, 1, 0)
    assert tile_lt(small, big)
    assert tile_le(small, big)
    assert tile_lesssim(small, big)
    assert not tile_lesssim_prime(small, big)
    assert tile_order(small, big) == "lt"
    assert tile_order(big, small) == "none"


def test_le_reflexive_and_lesssim_prime():
    P = _tile(1, 3, 5)
    assert tile_le(P, P) and not tile_lt(P, P)
    assert tile_order(P, P) == "le"
    # same spatial interval, nearby but not nested frequency: lesssim only
    big = _tile(2, 0, 0)
    shifted = _tile(0, 1, 2)
    if tile_lesssim(shifted, big) and not tile_le(shifted, big):
        assert tile_order(shifted, big) == "lesssim_prime"


def test_generated_collections_are_rank1_and_hereditary():
    coll = generate_rank1_collection(seed=7, scale_range=(-4, 0),
                                     window=(0, 32), count=8, C0=16,
                                     require_sparse=False, n_anchors=2)
    assert len(coll) == 8
    assert check_rank1(coll) == []
    assert check_rank1(coll[::2]) == []


def test_tree_collection_dichotomy_and_sparseness():
    for axis in (1, 2, 3):
        coll = generate_tree_collection(seed=3, axis=axis, depth=3,
                                        spatial_fan=2, C0=16)
        assert check_rank1(coll) == []
        assert tritile_collection_sparse(coll)
        top = max(coll, key=lambda P: P.I.length)
        T = maximal_tree(coll, top, axis)
        assert set(T.members) == set(coll)
        assert tree_frequency_dichotomy(T)


def test_tree_membership_validated():
    coll = generate_tree_collection(seed=5, axis=1, depth=2, spatial_fan=1,
                                    C0=16)
    top = max(coll, key=lambda P: P.I.length)
    leaf = min(coll, key=lambda P: P.I.length)
    with pytest.raises(ValueError):
        Tree(leaf, tuple(coll), 1)  # top must dominate every member
    T = maximal_tree(coll, top, 1)
    assert T.I_T == top.I
