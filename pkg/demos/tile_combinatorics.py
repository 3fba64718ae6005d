"""Exact tile combinatorics at desk scale: orders between tiles, rank-1
collections, trees, and the size / energy quantities measured on them.

Run:  python3 demos/tile_combinatorics.py
"""

from fractions import Fraction

from tritiles.dyadic import DyadicInterval
from tritiles.tilenorms import (
    CoefficientField,
    combinatorial_bound,
    energy_bruteforce,
    energy_greedy,
    size,
    size_oracle,
)
from tritiles.tiles import (
    Tile,
    check_rank1,
    generate_rank1_collection,
    generate_tree_collection,
    maximal_tree,
    tile_order,
    tree_frequency_dichotomy,
)

print("A tile is a spatial dyadic interval I and a frequency interval")
print("omega from a shifted grid, with |I| |omega| = 1.")
big = Tile(DyadicInterval(2, 0), DyadicInterval(-2, 0))
small = Tile(DyadicInterval(0, 1), DyadicInterval(0, 0))
print(f"  order of the smaller against the bigger: "
      f"{tile_order(small, big)!r}")

coll = generate_rank1_collection(seed=7, scale_range=(-4, 0), window=(0, 32),
                                 count=8, C0=16, require_sparse=False,
                                 n_anchors=2)
print(f"\nA generated collection of {len(coll)} tri-tiles is rank 1 "
      f"(violations: {len(check_rank1(coll))}), and stays rank 1 on subsets.")

tree_coll = generate_tree_collection(seed=3, axis=2, depth=3, spatial_fan=2,
                                     C0=16)
top = max(tree_coll, key=lambda P: P.I.length)
T = maximal_tree(tree_coll, top, 2)
print(f"A maximal 2-tree over {len(tree_coll)} tiles has "
      f"{len(T.members)} members; off-axis frequency intervals obey the "
      f"coincide-or-separate dichotomy: {tree_frequency_dichotomy(T)}")

field = CoefficientField.random(coll, seed=1)
print("\nSize is a sup over trees; on desk-size collections it is checked")
print("against exhaustive enumeration:")
for i in (1, 2, 3):
    print(f"  slot {i}:  size {size(field, coll, i):.6f}   "
          f"oracle {size_oracle(field, coll, i):.6f}")

small_coll = coll[:5]
small_field = CoefficientField.random(small_coll, seed=2)
g, _ = energy_greedy(small_field, small_coll, 1)
b = energy_bruteforce(small_field, small_coll, 1)
print(f"\nGreedy energy {g:.6f} vs brute force {b:.6f} "
      f"(greedy is always within a factor 2).")

lhs, rhs, ratio, _ = combinatorial_bound(
    field, coll, (Fraction(1, 3),) * 3)
print(f"\nSingle-scale form {lhs:.4f} <= C * size^th energy^(1-th) products "
      f"= C * {rhs:.4f}  (ratio {ratio:.3f}).")
