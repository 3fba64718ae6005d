"""Exact finite unions of rational intervals.

Used for measurable sets E in restricted-type arguments and for level sets
of step functions.  Intervals are half-open [l, r); all arithmetic is in
Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


@dataclass(frozen=True)
class IntervalUnion:
    """Disjoint sorted half-open intervals [l, r)."""

    parts: tuple[tuple[Fraction, Fraction], ...]

    @staticmethod
    def from_intervals(intervals: Iterable[tuple]) -> "IntervalUnion":
        items = sorted(
            (Fraction(l), Fraction(r)) for l, r in intervals if Fraction(l) < Fraction(r)
        )
        merged: list[tuple[Fraction, Fraction]] = []
        for l, r in items:
            if merged and l <= merged[-1][1]:
                last_l, last_r = merged[-1]
                merged[-1] = (last_l, max(last_r, r))
            else:
                merged.append((l, r))
        return IntervalUnion(tuple(merged))

    @staticmethod
    def empty() -> "IntervalUnion":
        return IntervalUnion(())

    def measure(self) -> Fraction:
        return sum((r - l for l, r in self.parts), Fraction(0))

    def contains_point(self, x) -> bool:
        x = Fraction(x)
        return any(l <= x < r for l, r in self.parts)

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        for l1, r1 in self.parts:
            for l2, r2 in other.parts:
                l, r = max(l1, l2), min(r1, r2)
                if l < r:
                    out.append((l, r))
        return IntervalUnion.from_intervals(out)

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion.from_intervals(list(self.parts) + list(other.parts))

    def complement_within(self, lo, hi) -> "IntervalUnion":
        lo, hi = Fraction(lo), Fraction(hi)
        out = []
        cursor = lo
        for l, r in self.parts:
            if r <= lo or l >= hi:
                continue
            if l > cursor:
                out.append((cursor, min(l, hi)))
            cursor = max(cursor, r)
        if cursor < hi:
            out.append((cursor, hi))
        return IntervalUnion.from_intervals(out)

    def distance_to_point(self, x) -> Fraction:
        x = Fraction(x)
        if not self.parts:
            raise ValueError("distance to the empty set is undefined")
        best = None
        for l, r in self.parts:
            if l <= x < r:
                return Fraction(0)
            d = l - x if x < l else x - r
            # right endpoint is not in the half-open set, but distance to the
            # closure is the natural notion for dist(I, R \ Omega)
            d = max(d, Fraction(0))
            best = d if best is None else min(best, d)
        return best

    def indicator(self, xs):
        """Vectorized membership for floating sample points."""
        import numpy as np

        xs = np.asarray(xs, dtype=float)
        out = np.zeros(xs.shape, dtype=bool)
        for l, r in self.parts:
            out |= (xs >= float(l)) & (xs < float(r))
        return out


def weak_l1_quasinorm(pieces: Sequence[tuple[float, Fraction]]) -> float:
    """||f||_{L^{1,inf}} = sup_v v * |{f >= v}| for a nonnegative step
    function given as (value, length) pieces.  The sup over v is attained at
    a value of the function, so only the finite value set is scanned;
    lengths stay exact, values may be irrational (floats)."""
    items = sorted(((float(v), Fraction(ln)) for v, ln in pieces if ln > 0),
                   key=lambda t: t[0], reverse=True)
    best = 0.0
    cum = Fraction(0)
    for v, ln in items:
        cum += ln
        if v > 0:
            best = max(best, v * float(cum))
    return best
