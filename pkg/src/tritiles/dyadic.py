"""Exact shifted dyadic grids.

Grid elements are intervals (and cubes) of the form

    2^j (k + (0,1)^n + (-1)^j sigma),   sigma in {0, 1/3, 2/3}^n.

Everything here is exact: endpoints are Fractions with denominator dividing
3*2^|j|, and every predicate (containment, overlap, dilation) is decided by
rational comparison.  No floating point is allowed in this module.

Intervals are half-open [left, right) so that same-scale grid intervals
partition the line exactly; boundary points never matter downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

SHIFTS = (Fraction(0), Fraction(1, 3), Fraction(2, 3))

# Separation constants fixed by the combinatorial definitions.
SPARSE_FACTOR = 10**9
ORDER_FACTOR = 10**7

# 2^30 > 10^9, used by split_sparse residue classes.
_SPARSE_STEP = 30
_SPARSE_MOD = 2**_SPARSE_STEP


def _as_shift(sigma) -> Fraction:
    s = Fraction(sigma)
    if s not in SHIFTS:
        raise ValueError(f"shift must be one of 0, 1/3, 2/3; got {sigma}")
    return s


@dataclass(frozen=True)
class DyadicInterval:
    """One interval of a shifted dyadic grid, scale 2^j, position k, shift sigma."""

    j: int
    k: int
    sigma: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "sigma", _as_shift(self.sigma))

    # endpoints are cached: interval objects are immutable and the order
    # predicates hammer these accessors inside O(n^2) pair loops
    @cached_property
    def length(self) -> Fraction:
        return Fraction(2) ** self.j

    @cached_property
    def left(self) -> Fraction:
        sign = 1 if self.j % 2 == 0 else -1
        return self.length * (self.k + sign * self.sigma)

    @cached_property
    def right(self) -> Fraction:
        return self.left + self.length

    @cached_property
    def center(self) -> Fraction:
        return self.left + self.length / 2

    def endpoints(self) -> tuple[Fraction, Fraction]:
        return (self.left, self.right)

    @lru_cache(maxsize=1 << 16)
    def dilate(self, c) -> "RationalInterval":
        """The interval cI: same center, length c*|I|.  c rational, exact."""
        c = Fraction(c)
        if c <= 0:
            raise ValueError("dilation factor must be positive")
        half = c * self.length / 2
        return RationalInterval(self.center - half, self.center + half)

    @cached_property
    def _rational(self) -> "RationalInterval":
        return RationalInterval(self.left, self.right)

    def as_rational(self) -> "RationalInterval":
        return self._rational

    def contains_point(self, x) -> bool:
        x = Fraction(x)
        return self.left <= x < self.right

    def encode(self) -> tuple[int, int, int]:
        """(j, k, sigma numerator over 3) for JSON reports."""
        return (self.j, self.k, int(self.sigma * 3))

    # hashing a Fraction is surprisingly costly and intervals are used as
    # dict keys inside the inner combinatorial loops, so cache the hash
    def __hash__(self):
        d = self.__dict__
        h = d.get("_hash")
        if h is None:
            h = hash((self.j, self.k, self.sigma))
            d["_hash"] = h
        return h


@dataclass(frozen=True)
class RationalInterval:
    """Plain rational interval, used for dilations cI.  Treated as closed
    for containment of dilated sets (the convention only matters on
    measure-zero boundaries, but it must be fixed)."""

    left: Fraction
    right: Fraction

    def __post_init__(self):
        object.__setattr__(self, "left", Fraction(self.left))
        object.__setattr__(self, "right", Fraction(self.right))
        if self.left > self.right:
            raise ValueError("empty rational interval")

    @property
    def length(self) -> Fraction:
        return self.right - self.left

    @property
    def center(self) -> Fraction:
        return (self.left + self.right) / 2

    def contains(self, other: "RationalInterval") -> bool:
        return self.left <= other.left and other.right <= self.right

    def overlaps(self, other: "RationalInterval") -> bool:
        """Nonempty open intersection."""
        return self.left < other.right and other.left < self.right

    def contains_point(self, x) -> bool:
        x = Fraction(x)
        return self.left <= x <= self.right

    def distance_to_point(self, x) -> Fraction:
        x = Fraction(x)
        if x < self.left:
            return self.left - x
        if x > self.right:
            return x - self.right
        return Fraction(0)


def dilated_contains(I: DyadicInterval, c, Ip: DyadicInterval, cp) -> bool:
    """True iff c'I' is contained in cI, decided exactly."""
    return I.dilate(c).contains(Ip.dilate(cp))


@dataclass(frozen=True)
class ShiftedDyadicCube:
    """Product of n component intervals sharing one scale j."""

    j: int
    k: tuple[int, ...]
    sigma: tuple[Fraction, ...]

    def __post_init__(self):
        k = tuple(int(x) for x in self.k)
        sigma = tuple(_as_shift(s) for s in self.sigma)
        if len(k) != len(sigma):
            raise ValueError("k and sigma must have equal length")
        if not 1 <= len(k) <= 3:
            raise ValueError("dimension must be 1..3")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "sigma", sigma)

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def side(self) -> Fraction:
        return Fraction(2) ** self.j

    def component(self, i: int) -> DyadicInterval:
        return DyadicInterval(self.j, self.k[i], self.sigma[i])

    @property
    def components(self) -> tuple[DyadicInterval, ...]:
        return tuple(self.component(i) for i in range(self.n))

    @property
    def center(self) -> tuple[Fraction, ...]:
        return tuple(c.center for c in self.components)

    def dilate(self, c) -> tuple[RationalInterval, ...]:
        return tuple(comp.dilate(c) for comp in self.components)

    def encode(self) -> dict:
        return {
            "j": self.j,
            "k": list(self.k),
            "sigma": [int(s * 3) for s in self.sigma],
        }


def cubes_dilated_overlap(Q: ShiftedDyadicCube, Qp: ShiftedDyadicCube, c) -> bool:
    """True iff cQ and cQ' have nonempty open intersection (all axes overlap)."""
    if Q.n != Qp.n:
        raise ValueError("dimension mismatch")
    return all(a.overlaps(b) for a, b in zip(Q.dilate(c), Qp.dilate(c)))


def enumerate_grid(sigma, j_range, window) -> list[ShiftedDyadicCube]:
    """All cubes of D^n_sigma with j in j_range meeting the window.

    window: sequence of (lo, hi) rational pairs, one per axis.  "Meeting"
    means nonempty intersection of the half-open cube with the closed
    window box.  Output is ordered lexicographically in (j, k).
    """
    sigma = tuple(_as_shift(s) for s in (sigma if isinstance(sigma, (tuple, list)) else (sigma,)))
    n = len(sigma)
    window = [(Fraction(lo), Fraction(hi)) for lo, hi in window]
    if len(window) != n:
        raise ValueError("window dimension mismatch")
    out: list[ShiftedDyadicCube] = []
    for j in sorted(j_range):
        sign = 1 if j % 2 == 0 else -1
        scale = Fraction(2) ** j
        # Per axis: k with [2^j(k + sign*s), 2^j(k+1+sign*s)) meeting [lo, hi]:
        # left <= hi and right > lo.
        axis_ranges = []
        for (lo, hi), s in zip(window, sigma):
            # left <= hi  =>  k <= hi/2^j - sign*s
            k_hi = (hi / scale - sign * s)
            k_hi_int = k_hi.numerator // k_hi.denominator  # floor
            # right > lo  =>  k > lo/2^j - sign*s - 1
            k_lo = (lo / scale - sign * s - 1)
            k_lo_int = k_lo.numerator // k_lo.denominator + 1  # least k with k > k_lo
            axis_ranges.append(range(k_lo_int, k_hi_int + 1))
        def rec(axis, acc):
            if axis == n:
                out.append(ShiftedDyadicCube(j, tuple(acc), sigma))
                return
            for k in axis_ranges[axis]:
                rec(axis + 1, acc + [k])
        rec(0, [])
    return out


def is_sparse(cubes: Sequence[ShiftedDyadicCube]) -> bool:
    """Direct pairwise test of the sparseness definition (independent oracle)."""
    for a in range(len(cubes)):
        for b in range(a + 1, len(cubes)):
            Q, Qp = cubes[a], cubes[b]
            if Q.j == Qp.j:
                if Q.k == Qp.k and Q.sigma == Qp.sigma:
                    continue  # identical cube repeated; not a violation pair
                if cubes_dilated_overlap(Q, Qp, SPARSE_FACTOR):
                    return False
            else:
                small, big = (Q, Qp) if Q.j < Qp.j else (Qp, Q)
                if SPARSE_FACTOR * small.side >= big.side:
                    return False
    return True


def split_sparse(cubes: Sequence[ShiftedDyadicCube]) -> list[list[ShiftedDyadicCube]]:
    """Split one grid's cubes into sparse sub-collections.

    Classes are keyed by (j mod 30, k mod 2^30 per coordinate).  Within a
    class, distinct scales differ by >= 30 dyadic levels (2^30 > 10^9) and
    same-scale cubes are >= 2^30 cells apart, so the 10^9-dilations cannot
    meet.  The class count is bounded independently of the input.
    """
    if not cubes:
        return []
    sig = cubes[0].sigma
    n = cubes[0].n
    for Q in cubes:
        if Q.sigma != sig or Q.n != n:
            raise ValueError("split_sparse requires cubes from a single shifted grid")
    classes: dict[tuple, list[ShiftedDyadicCube]] = {}
    for Q in cubes:
        key = (Q.j % _SPARSE_STEP, tuple(ki % _SPARSE_MOD for ki in Q.k))
        classes.setdefault(key, []).append(Q)
    return [classes[key] for key in sorted(classes)]


def standard_dyadic_cover(I: DyadicInterval, factor: int) -> DyadicInterval:
    """The unique standard (sigma=0) dyadic interval of length factor*|I|
    containing the standard dyadic interval I.  factor must be a power of 2."""
    if I.sigma != 0:
        raise ValueError("only standard dyadic intervals nest in the standard grid")
    g = factor.bit_length() - 1
    if 2**g != factor or factor < 1:
        raise ValueError("factor must be a positive power of two")
    # left = 2^j k; parent at scale j+g has position floor(k / 2^g)
    # (>> is an arithmetic shift, i.e. floor division, also for negative k)
    return DyadicInterval(I.j + g, I.k >> g, Fraction(0))
