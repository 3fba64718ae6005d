"""Tiles, tri-tiles, order relations, rank-1 checkers, trees.

A tile is a phase-plane rectangle I x omega with I from the standard dyadic
grid, omega from a shifted dyadic grid, and |I|*|omega| = 1.  A tri-tile
shares one spatial interval across three frequency intervals of a common
scale.  All predicates are exact (rational arithmetic from the dyadic
module); collections are plain tuples/lists of immutable values.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .dyadic import (
    ORDER_FACTOR,
    SPARSE_FACTOR,
    SHIFTS,
    DyadicInterval,
    RationalInterval,
    ShiftedDyadicCube,
    cubes_dilated_overlap,
    is_sparse,
)


@dataclass(frozen=True)
class Tile:
    I: DyadicInterval
    omega: DyadicInterval

    def __post_init__(self):
        if self.I.sigma != 0:
            raise ValueError("spatial interval must come from the standard grid")
        if self.omega.j != -self.I.j:
            raise ValueError("tile must satisfy |I|*|omega| = 1")

    @property
    def scale(self) -> Fraction:
        """Spatial length |I| = 1/|omega|."""
        return self.I.length

    def __hash__(self):
        d = self.__dict__
        h = d.get("_hash")
        if h is None:
            h = hash((self.I, self.omega))
            d["_hash"] = h
        return h


@dataclass(frozen=True)
class TriTile:
    I: DyadicInterval
    omegas: tuple[DyadicInterval, DyadicInterval, DyadicInterval]

    def __post_init__(self):
        object.__setattr__(self, "omegas", tuple(self.omegas))
        if len(self.omegas) != 3:
            raise ValueError("a tri-tile has exactly three frequency intervals")
        for w in self.omegas:
            if w.j != -self.I.j:
                raise ValueError("all frequency intervals must have scale 1/|I|")
        if self.I.sigma != 0:
            raise ValueError("spatial interval must come from the standard grid")

    def tile(self, i: int) -> Tile:
        """The i-tile P_i, i in {1,2,3}.  Cached: the order predicates and
        tree loops request the same component tiles millions of times."""
        d = self.__dict__
        tiles = d.get("_tiles")
        if tiles is None:
            tiles = tuple(Tile(self.I, w) for w in self.omegas)
            d["_tiles"] = tiles
        return tiles[i - 1]

    def __hash__(self):
        d = self.__dict__
        h = d.get("_hash")
        if h is None:
            h = hash((self.I, self.omegas))
            d["_hash"] = h
        return h

    @property
    def shift(self) -> tuple[Fraction, Fraction, Fraction]:
        return tuple(w.sigma for w in self.omegas)

    @property
    def frequency_cube(self) -> ShiftedDyadicCube:
        return ShiftedDyadicCube(
            self.omegas[0].j,
            tuple(w.k for w in self.omegas),
            tuple(w.sigma for w in self.omegas),
        )

    def encode(self) -> dict:
        return {"I": self.I.encode(), "omegas": [w.encode() for w in self.omegas]}


# ---------------------------------------------------------------------------
# Tile order relations.
# ---------------------------------------------------------------------------

def tile_lt(Pp: Tile, P: Tile) -> bool:
    """P' < P: I_{P'} strictly inside I_P and 3*omega_P inside 3*omega_{P'}."""
    Ip, I = Pp.I.as_rational(), P.I.as_rational()
    if not (I.contains(Ip) and Ip != I):
        return False
    return Pp.omega.dilate(3).contains(P.omega.dilate(3))


def tile_le(Pp: Tile, P: Tile) -> bool:
    return Pp == P or tile_lt(Pp, P)


def tile_lesssim(Pp: Tile, P: Tile) -> bool:
    if not P.I.as_rational().contains(Pp.I.as_rational()):
        return False
    return Pp.omega.dilate(ORDER_FACTOR).contains(P.omega.dilate(ORDER_FACTOR))


def tile_lesssim_prime(Pp: Tile, P: Tile) -> bool:
    return tile_lesssim(Pp, P) and not tile_le(Pp, P)


def tile_order(Pp: Tile, P: Tile) -> str:
    """Strongest applicable relation of P' against P.

    Returns one of "lt", "le", "lesssim_prime", "none".  A bare "lesssim"
    never wins: together with "le" it is subsumed, without "le" it is
    exactly "lesssim_prime".
    """
    if tile_lt(Pp, P):
        return "lt"
    if Pp == P:
        return "le"
    if tile_lesssim(Pp, P):
        return "lesssim_prime"
    return "none"


# ---------------------------------------------------------------------------
# Rank 1.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    clause: str
    first: int
    second: int
    detail: str = ""


def _common_shift(collection: Sequence[TriTile]):
    shifts = {tt.shift for tt in collection}
    if len(shifts) > 1:
        raise ValueError("collection mixes shifts")


def check_rank1(collection: Sequence[TriTile]) -> list[Violation]:
    """Pairwise check of the rank-1 properties for tri-tile collections.

    Empty result means the collection passes.  All ordered pairs are
    examined; the size hypothesis |I_{P'}| < 10^9 |I_P| of the last clause
    is checked literally even though P'_i <= P_i already implies it.
    """
    _common_shift(collection)
    out: list[Violation] = []
    n = len(collection)
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            P, Pp = collection[a], collection[b]  # P' = collection[b]
            if P == Pp:
                continue
            # clause 1: no shared component tiles between distinct tri-tiles
            for i in (1, 2, 3):
                if P.tile(i) == Pp.tile(i):
                    out.append(Violation("component-equality", a, b, f"i={i}"))
            le_axes = [i for i in (1, 2, 3) if tile_le(Pp.tile(i), P.tile(i))]
            if not le_axes:
                continue
            # clause 2: P'_i <= P_i for some i forces P'_j <~ P_j for all j
            for jax in (1, 2, 3):
                if not tile_lesssim(Pp.tile(jax), P.tile(jax)):
                    out.append(Violation("order-propagation", a, b, f"j={jax}"))
            # clause 3: with the (always satisfied) size hypothesis, the
            # off-axes must be <~' (strictly not <=)
            if Pp.I.length < SPARSE_FACTOR * P.I.length:
                for i in le_axes:
                    for jax in (1, 2, 3):
                        if jax == i:
                            continue
                        if not tile_lesssim_prime(Pp.tile(jax), P.tile(jax)):
                            out.append(
                                Violation("strict-off-axis", a, b, f"i={i}, j={jax}")
                            )
    return out


def check_rank1_cubes(cubes: Sequence[ShiftedDyadicCube]) -> list[Violation]:
    """The rank-1 definition for collections of frequency cubes (n=3).

    Kept separate from the tri-tile checker on purpose: the two
    definitions use different dilation constants and are not interchanged.
    """
    out: list[Violation] = []
    n = len(cubes)
    for a in range(n):
        for b in range(n):
            if a == b or cubes[a] == cubes[b]:
                continue
            Q, Qp = cubes[a], cubes[b]
            if Q.n != 3 or Qp.n != 3:
                raise ValueError("rank-1 cube check needs 3-dimensional cubes")
            if b > a and cubes_dilated_overlap(Q, Qp, 1):
                out.append(Violation("cube-overlap", a, b))
            for i in range(3):
                if Q.component(i) == Qp.component(i):
                    if b > a:
                        out.append(Violation("component-equality", a, b, f"i={i+1}"))
            three_axes = [
                i
                for i in range(3)
                if Q.component(i).dilate(3).contains(Qp.component(i).dilate(3))
            ]
            if not three_axes:
                continue
            for jax in range(3):
                if not Q.component(jax).dilate(ORDER_FACTOR).contains(
                    Qp.component(jax).dilate(ORDER_FACTOR)
                ):
                    out.append(Violation("order-propagation", a, b, f"j={jax+1}"))
            if Qp.side < SPARSE_FACTOR * Q.side:
                for i in three_axes:
                    for jax in range(3):
                        if jax == i:
                            continue
                        if Q.component(jax).dilate(3).overlaps(
                            Qp.component(jax).dilate(3)
                        ):
                            out.append(
                                Violation("strict-off-axis", a, b, f"i={i+1}, j={jax+1}")
                            )
    return out


def tritile_collection_sparse(collection: Sequence[TriTile]) -> bool:
    """Sparseness for tri-tile sets: one shift, sparse frequency cubes."""
    if not collection:
        return True
    try:
        _common_shift(collection)
    except ValueError:
        return False
    return is_sparse([tt.frequency_cube for tt in collection])


# ---------------------------------------------------------------------------
# Trees.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tree:
    top: TriTile
    members: tuple[TriTile, ...]
    axis: int  # i in {1,2,3}

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if self.axis not in (1, 2, 3):
            raise ValueError("tree axis must be 1, 2 or 3")
        for P in self.members:
            if not tile_le(P.tile(self.axis), self.top.tile(self.axis)):
                raise ValueError("tree member is not below the top in the tile order")

    @property
    def I_T(self) -> DyadicInterval:
        return self.top.I

    def spatial_support(self) -> RationalInterval:
        return self.top.I.as_rational()


def maximal_tree(collection: Sequence[TriTile], top: TriTile, axis: int) -> Tree:
    """All members of the collection sitting below `top` along `axis`."""
    if top not in collection:
        raise ValueError("tree top must belong to the collection")
    members = tuple(
        P for P in collection if tile_le(P.tile(axis), top.tile(axis))
    )
    return Tree(top, members, axis)


def strongly_disjoint(T: Tree, Tp: Tree, i: int) -> bool:
    """Strong i-disjointness of two trees (exact, pairwise)."""
    for P in T.members:
        for Pp in Tp.members:
            if P.tile(i) == Pp.tile(i):
                return False
            if P.omegas[i - 1].dilate(2).overlaps(Pp.omegas[i - 1].dilate(2)):
                if Pp.I.as_rational().overlaps(T.I_T.as_rational()):
                    return False
                if P.I.as_rational().overlaps(Tp.I_T.as_rational()):
                    return False
    return True


def tree_frequency_dichotomy(T: Tree) -> bool:
    """For an i-tree over a sparse rank-1 collection: off-axis frequency
    intervals of two members either coincide or have disjoint 2-dilations."""
    i = T.axis
    for a in range(len(T.members)):
        for b in range(a + 1, len(T.members)):
            for jax in (1, 2, 3):
                if jax == i:
                    continue
                wa = T.members[a].omegas[jax - 1]
                wb = T.members[b].omegas[jax - 1]
                if wa == wb:
                    continue
                if wa.dilate(2).overlaps(wb.dilate(2)):
                    return False
    return True


def check_lacunary(omegas: Sequence[DyadicInterval], xi, band=(Fraction(1, 1000), Fraction(1000))) -> tuple[bool, dict]:
    """dist(xi, omega) within [c_lo, c_hi]*|omega| for every omega.

    Returns (verdict, report); an empty family is vacuously true and
    flagged as such in the report.
    """
    c_lo, c_hi = Fraction(band[0]), Fraction(band[1])
    if not 0 < c_lo < c_hi:
        raise ValueError("band constants must satisfy 0 < c_lo < c_hi")
    xi = Fraction(xi)
    if not omegas:
        return True, {"vacuous": True, "band": (str(c_lo), str(c_hi))}
    ratios = []
    ok = True
    for w in omegas:
        d = w.as_rational().distance_to_point(xi)
        ratios.append(d / w.length)
        if not (c_lo * w.length <= d <= c_hi * w.length):
            ok = False
    return ok, {
        "vacuous": False,
        "band": (str(c_lo), str(c_hi)),
        "min_ratio": str(min(ratios)),
        "max_ratio": str(max(ratios)),
    }


# ---------------------------------------------------------------------------
# Random generation of rank-1 collections.
# ---------------------------------------------------------------------------

DEFAULT_C0 = 2**10


def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def _cube_through_point(point, j, sigma) -> ShiftedDyadicCube:
    """The unique cube of D^n_sigma at scale j whose half-open box holds the point."""
    sign = 1 if j % 2 == 0 else -1
    scale = Fraction(2) ** j
    k = tuple(
        _floor_frac(Fraction(x) / scale - sign * s) for x, s in zip(point, sigma)
    )
    return ShiftedDyadicCube(j, k, tuple(sigma))


def _tritile_from_cube(cube: ShiftedDyadicCube, spatial_k: int) -> TriTile:
    I = DyadicInterval(-cube.j, spatial_k, Fraction(0))
    return TriTile(I, cube.components)


def generate_rank1_collection(
    seed: int,
    scale_range: tuple[int, int] = (-6, 0),
    window: tuple = (0, 64),
    count: int = 20,
    C0: int = DEFAULT_C0,
    require_sparse: bool = False,
    sparse_scale_step: int = 30,
    n_anchors: int = 3,
) -> list[TriTile]:
    """Seeded generator of rank-1 tri-tile collections.

    Frequency cubes follow the diagonal Whitney pattern: centers sit near a
    common anchor t*(1,1,1), one axis aligned on the anchor and the other
    two offset by roughly +-C0*scale, which is what makes the order
    relations propagate the right way across scales.  Candidates violating
    the exact checkers are discarded, so the output is rank 1 by
    construction *and* by verification.

    With require_sparse the scales are snapped to a lattice of step
    sparse_scale_step (must give scale gaps > 10^9, i.e. step >= 30) so the
    frequency-cube family is sparse in the strict sense.  Without it the
    collection generally is not sparse (close scales cannot be), which the
    caller must treat as the desk-scale regime.
    """
    rng = random.Random(seed)
    jlo, jhi = scale_range
    if require_sparse and sparse_scale_step < 30:
        raise ValueError("sparse collections need scale steps of at least 30")
    if require_sparse:
        scales = [jlo + sparse_scale_step * m for m in range(max(1, (jhi - jlo) // sparse_scale_step + 1))]
    else:
        scales = list(range(jlo, jhi + 1))
    sigma = tuple(rng.choice(SHIFTS) for _ in range(3))
    wlo, whi = Fraction(window[0]), Fraction(window[1])

    anchors = []
    for _ in range(max(1, n_anchors)):
        # anchor on the frequency diagonal, dyadic rational
        num = rng.randrange(int((whi - wlo) * 16))
        anchors.append(wlo + Fraction(num, 16))

    out: list[TriTile] = []
    tries = 0
    max_tries = 200 * count + 200
    while len(out) < count and tries < max_tries:
        tries += 1
        j = rng.choice(scales)
        t = rng.choice(anchors)
        scale = Fraction(2) ** j
        aligned = rng.randrange(3)
        u = Fraction(rng.choice((4, 5, 6, 7)), 4)  # offset multiplier in [1,2)
        signs = rng.choice(((1, -1), (-1, 1), (1, 1), (-1, -1)))
        center = [t, t, t]
        s_idx = 0
        for ax in range(3):
            if ax == aligned:
                continue
            center[ax] = t + signs[s_idx] * C0 * scale * u
            s_idx += 1
        cube = _cube_through_point(center, j, sigma)
        # spatial interval: position sampled at the matching scale; nesting
        # across scales happens naturally when positions land inside a
        # coarser interval
        span = 2 ** min(12, max(2, -j + 2))
        spatial_k = rng.randrange(0, span)
        cand = _tritile_from_cube(cube, spatial_k)
        if cand in out:
            continue
        trial = out + [cand]
        if check_rank1(trial):
            continue
        if require_sparse and not tritile_collection_sparse(trial):
            continue
        out.append(cand)
    if len(out) < count:
        warnings.warn(
            f"generate_rank1_collection: produced {len(out)} of {count} requested tri-tiles",
            RuntimeWarning,
        )
    return out


def generate_tree_collection(
    seed: int,
    axis: int = 1,
    depth: int = 3,
    scale_step: int = 30,
    spatial_fan: int = 2,
    C0: int = DEFAULT_C0,
    base_scale: int = 0,
    anchor=None,
    sigma=None,
    require_sparse: bool = True,
) -> list[TriTile]:
    """A rank-1 collection organized as nested axis-trees.

    The coarsest tri-tile (largest spatial interval) can serve as a tree
    top; deeper levels shrink the spatial interval and enlarge the
    frequency cube while keeping the `axis` component aligned on the
    anchor, which yields axis-order chains P'_axis <= P_axis.
    """
    rng = random.Random(seed)
    if sigma is None:
        sigma = tuple(rng.choice(SHIFTS) for _ in range(3))
    if anchor is None:
        anchor = Fraction(rng.randrange(0, 64), 4)
    out: list[TriTile] = []
    for level in range(depth):
        j = base_scale + level * scale_step  # frequency scale grows
        scale = Fraction(2) ** j
        center = [anchor, anchor, anchor]
        off = 0
        for ax in range(3):
            if ax == axis - 1:
                continue
            sign = 1 if off == 0 else -1
            center[ax] = anchor + sign * C0 * scale
            off += 1
        cube = _cube_through_point(center, j, sigma)
        n_spatial = 1 if level == 0 else spatial_fan
        # nest spatial intervals inside the level-0 interval [0, 2^{-base_scale})
        gap = scale_step * level
        for m in range(n_spatial):
            top_positions = 2**gap  # children of the coarsest interval
            spatial_k = rng.randrange(min(top_positions, 1 << 16)) if top_positions > 1 else 0
            cand = _tritile_from_cube(cube, spatial_k)
            trial = out + [cand]
            if check_rank1(trial) or cand in out:
                continue
            if require_sparse and not tritile_collection_sparse(trial):
                continue
            out.append(cand)
    return out
