"""Size and energy norms on tri-tile collections.

Coefficients a^{(i)} attach to i-tiles, not to full tri-tiles; a field
stores one complex number per (slot, tile).  Size takes a sup over j-trees
with j different from the coefficient slot; since adding members only
increases the l^2 sum, the sup is realized on maximal trees and size is
computed exactly.  Energy is a sup over levels n and families of strongly
disjoint trees subject to a lower threshold per tree and an upper bound on
every subtree; the greedy selector returns a certified lower bound with an
explicit witness, and a brute-force oracle covers small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from .dyadic import DyadicInterval
from .sets import IntervalUnion, weak_l1_quasinorm
from .tiles import Tile, Tree, TriTile, maximal_tree, strongly_disjoint, tile_le


@dataclass
class CoefficientField:
    """Map (slot i, i-tile) -> complex coefficient a^{(i)}_{P_i}."""

    slots: Dict[int, Dict[Tile, complex]]
    provenance: str = "synthetic"

    def __post_init__(self):
        for i in self.slots:
            if i not in (1, 2, 3):
                raise ValueError("slots are 1, 2, 3")

    def a(self, P: TriTile, i: int) -> complex:
        return self.slots.get(i, {}).get(P.tile(i), 0.0 + 0.0j)

    @staticmethod
    def from_tritile_values(values: Dict[tuple, complex], provenance: str = "synthetic") -> "CoefficientField":
        """Build from {(TriTile, i): value}; rejects inconsistent values on a
        shared i-tile."""
        slots: Dict[int, Dict[Tile, complex]] = {1: {}, 2: {}, 3: {}}
        for (P, i), v in values.items():
            t = P.tile(i)
            if t in slots[i] and slots[i][t] != v:
                raise ValueError(
                    f"tri-tiles sharing the {i}-tile must carry equal coefficients"
                )
            slots[i][t] = complex(v)
        return CoefficientField(slots, provenance)

    @staticmethod
    def random(collection: Sequence[TriTile], seed: int, provenance: str = "synthetic") -> "CoefficientField":
        rng = np.random.default_rng(seed)
        slots: Dict[int, Dict[Tile, complex]] = {1: {}, 2: {}, 3: {}}
        for P in collection:
            for i in (1, 2, 3):
                t = P.tile(i)
                if t not in slots[i]:
                    slots[i][t] = complex(rng.normal(), rng.normal())
        return CoefficientField(slots, provenance)

    def scaled(self, lam: complex, i: int) -> "CoefficientField":
        slots = {j: dict(d) for j, d in self.slots.items()}
        slots[i] = {t: lam * v for t, v in slots[i].items()}
        return CoefficientField(slots, self.provenance)


def _tree_sum_sq(field: CoefficientField, T: Tree, i: int) -> float:
    seen: set[Tile] = set()
    total = 0.0
    for P in T.members:
        t = P.tile(i)
        if t in seen:
            continue
        seen.add(t)
        total += abs(field.a(P, i)) ** 2
    return total


def size(field: CoefficientField, collection: Sequence[TriTile], i: int) -> float:
    """sup over j-trees, j != i, of (|I_T|^{-1} sum |a^{(i)}|^2)^{1/2}."""
    best = 0.0
    for top in collection:
        for j in (1, 2, 3):
            if j == i:
                continue
            T = maximal_tree(collection, top, j)
            val = _tree_sum_sq(field, T, i) / float(top.I.length)
            best = max(best, val)
    return math.sqrt(best)


def size_oracle(field: CoefficientField, collection: Sequence[TriTile], i: int) -> float:
    """Exhaustive sup over (top, axis, member subset): the brute-force
    companion of size; only sensible for small collections."""
    best = 0.0
    for top in collection:
        for j in (1, 2, 3):
            if j == i:
                continue
            T = maximal_tree(collection, top, j)
            members = list(T.members)
            for r in range(1, len(members) + 1):
                for sub in combinations(members, r):
                    val = _tree_sum_sq(field, Tree(top, sub, j), i) / float(top.I.length)
                    best = max(best, val)
    return math.sqrt(best)


def size_jn(field: CoefficientField, collection: Sequence[TriTile], i: int) -> float:
    """John-Nirenberg variant: sup over maximal j-trees (j != i) of

        |I_T|^{-1} || (sum_{P in T} |a|^2 chi_{I_P} / |I_P|)^{1/2} ||_{L^{1,inf}(I_T)}

    with the weak quasinorm evaluated exactly on the step function."""
    best = 0.0
    for top in collection:
        for j in (1, 2, 3):
            if j == i:
                continue
            T = maximal_tree(collection, top, j)
            val = _jn_tree_value(field, T, i)
            best = max(best, val)
    return best


def _jn_tree_value(field: CoefficientField, T: Tree, i: int) -> float:
    I_T = T.I_T
    cuts = {I_T.left, I_T.right}
    contribs = []  # (left, right, |a|^2/|I_P|) per distinct i-tile
    seen: set[Tile] = set()
    for P in T.members:
        t = P.tile(i)
        if t in seen:
            continue
        seen.add(t)
        l, r = max(P.I.left, I_T.left), min(P.I.right, I_T.right)
        if l >= r:
            continue
        cuts.update((l, r))
        contribs.append((l, r, abs(field.a(P, i)) ** 2 / float(P.I.length)))
    points = sorted(cuts)
    pieces = []
    for a, b in zip(points[:-1], points[1:]):
        h = sum(c for l, r, c in contribs if l <= a and b <= r)
        pieces.append((math.sqrt(h), b - a))
    return weak_l1_quasinorm(pieces) / float(I_T.length)


# ---------------------------------------------------------------------------
# Energy.
# ---------------------------------------------------------------------------

@dataclass
class EnergySelection:
    """A level n and a family of strongly i-disjoint i-trees witnessing the
    energy value 2^n (sum |I_T|)^{1/2}."""

    n: int
    i: int
    trees: list[Tree]
    tree_sums: list[float] = dc_field(default_factory=list)

    def value(self) -> float:
        total = sum(float(T.I_T.length) for T in self.trees)
        return 2.0**self.n * math.sqrt(total)

    def validate(self, field: CoefficientField) -> list[str]:
        """All Def constraints; empty list means the witness is valid."""
        problems = []
        for a in range(len(self.trees)):
            for b in range(a + 1, len(self.trees)):
                if not strongly_disjoint(self.trees[a], self.trees[b], self.i):
                    problems.append(f"trees {a} and {b} not strongly disjoint")
        for idx, T in enumerate(self.trees):
            if T.axis != self.i:
                problems.append(f"tree {idx} is not an {self.i}-tree")
            s = _tree_sum_sq(field, T, self.i)
            if math.sqrt(s) < 2.0**self.n * math.sqrt(float(T.I_T.length)) - 1e-12:
                problems.append(f"tree {idx} misses the lower threshold")
            for fail in _subtree_violations(field, T, self.i, self.n):
                problems.append(f"tree {idx}: {fail}")
        return problems


def _subtree_violations(field: CoefficientField, T: Tree, i: int, n: int) -> list[str]:
    """Upper bound 2^{n+1}|I_{T'}|^{1/2} for every subtree T' of T.

    The binding subtree for each candidate top is the maximal one (adding
    members only raises the sum), so only |T| subtrees need checking.
    """
    out = []
    for Q in T.members:
        sub = tuple(P for P in T.members if tile_le(P.tile(i), Q.tile(i)))
        s = _tree_sum_sq(field, Tree(Q, sub, i), i)
        if math.sqrt(s) > 2.0 ** (n + 1) * math.sqrt(float(Q.I.length)) + 1e-12:
            out.append(f"subtree at {Q.encode()} exceeds the upper bound")
    return out


def _energy_n_window(field: CoefficientField, collection: Sequence[TriTile], i: int):
    mags = [abs(field.a(P, i)) for P in collection if abs(field.a(P, i)) > 0]
    if not mags:
        return None
    total_sq = sum(m**2 for m in mags)
    max_len = max(float(P.I.length) for P in collection)
    lo = math.floor(math.log2(min(mags) / math.sqrt(max_len))) - 1
    hi = math.ceil(math.log2(math.sqrt(total_sq))) + 1
    return range(hi, lo - 1, -1)


def energy_greedy(field: CoefficientField, collection: Sequence[TriTile], i: int):
    """Greedy witness for the energy: descending levels n; within a level,
    candidate tops by |I_T| descending then spatial position.  Returns
    (value, EnergySelection); the selection is always a valid witness, so
    the value is a certified lower bound."""
    window = _energy_n_window(field, collection, i)
    empty = EnergySelection(0, i, [])
    if window is None:
        return 0.0, empty
    best_val, best_sel = 0.0, empty
    order = sorted(
        collection,
        key=lambda P: (-P.I.length, P.I.left, P.omegas[i - 1].left),
    )
    below = {
        top: tuple(P for P in collection if tile_le(P.tile(i), top.tile(i)))
        for top in order
    }
    for n in window:
        used: set[TriTile] = set()
        chosen: list[Tree] = []
        sums: list[float] = []
        for top in order:
            if top in used:
                continue
            members = tuple(P for P in below[top] if P not in used)
            if not members:
                continue
            T = Tree(top, members, i)
            s = _tree_sum_sq(field, T, i)
            if math.sqrt(s) < 2.0**n * math.sqrt(float(top.I.length)):
                continue
            if _subtree_violations(field, T, i, n):
                continue
            if any(not strongly_disjoint(T, S, i) for S in chosen):
                continue
            chosen.append(T)
            sums.append(s)
            used.update(T.members)
        if chosen:
            sel = EnergySelection(n, i, chosen, sums)
            if sel.value() > best_val:
                best_val, best_sel = sel.value(), sel
    return best_val, best_sel


def energy_bruteforce(field: CoefficientField, collection: Sequence[TriTile], i: int) -> float:
    """Exhaustive energy on small instances: all levels in the provable
    window, all families of valid trees (top plus member subset) that are
    pairwise strongly disjoint with disjoint member sets."""
    if len(collection) > 10:
        raise ValueError("brute force is limited to collections of at most 10 tiles")
    window = _energy_n_window(field, collection, i)
    if window is None:
        return 0.0
    best = 0.0
    for n in window:
        trees = _valid_trees(field, collection, i, n)
        total = _best_family(trees, i, 0, [], 0.0)
        best = max(best, 2.0**n * math.sqrt(total))
    return best


def _valid_trees(field, collection, i, n):
    out = []
    for top in collection:
        base = maximal_tree(collection, top, i).members
        for r in range(1, len(base) + 1):
            for sub in combinations(base, r):
                if top not in sub:
                    continue
                T = Tree(top, sub, i)
                s = _tree_sum_sq(field, T, i)
                if math.sqrt(s) < 2.0**n * math.sqrt(float(top.I.length)):
                    continue
                if _subtree_violations(field, T, i, n):
                    continue
                out.append(T)
    return out


def _best_family(trees: list[Tree], i: int, start: int, chosen: list[Tree], acc: float) -> float:
    best = acc
    for idx in range(start, len(trees)):
        T = trees[idx]
        members = set(T.members)
        if any(members & set(S.members) for S in chosen):
            continue
        if any(not strongly_disjoint(T, S, i) for S in chosen):
            continue
        chosen.append(T)
        best = max(
            best,
            _best_family(trees, i, idx + 1, chosen, acc + float(T.I_T.length)),
        )
        chosen.pop()
    return best


# ---------------------------------------------------------------------------
# The combinatorial bound.
# ---------------------------------------------------------------------------

def combinatorial_bound(field: CoefficientField, collection: Sequence[TriTile],
                        thetas: tuple[float, float, float]):
    """LHS = |sum_P |I_P|^{-1/2} prod_i a^{(i)}_{P_i}| against
    RHS = prod_i size_i^{theta_i} energy_i^{1 - theta_i}.

    Greedy energy makes the reported RHS a lower bound of the true RHS, so
    recorded ratios are conservative (never flattered).
    """
    t1, t2, t3 = thetas
    if not all(0 <= t < 1 for t in thetas) or abs(t1 + t2 + t3 - 1.0) > 1e-12:
        raise ValueError("need 0 <= theta_i < 1 with sum 1")
    lhs = abs(sum(
        field.a(P, 1) * field.a(P, 2) * field.a(P, 3) / math.sqrt(float(P.I.length))
        for P in collection
    ))
    rhs = 1.0
    parts = {}
    for i, th in zip((1, 2, 3), thetas):
        s = size(field, collection, i)
        e, _ = energy_greedy(field, collection, i)
        parts[i] = {"size": s, "energy": e}
        rhs *= s**th * e ** (1.0 - th)
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return lhs, rhs, ratio, parts


# ---------------------------------------------------------------------------
# Size estimate right-hand side (integrals of powers of the cutoff).
# ---------------------------------------------------------------------------

def _cutoff_antiderivative(u: float, M: int) -> float:
    """F_M with F_M' = (1 + u^2)^{-M/2}: F_1 = asinh, F_2 = arctan, and
    F_M = u (1+u^2)^{-(M-2)/2} / (M-2) + (M-3)/(M-2) F_{M-2}."""
    if M < 1:
        raise ValueError("M must be >= 1")
    if M % 2 == 1:
        vals = [math.asinh(u)]
    else:
        vals = [math.atan(u)]
    m = 1 if M % 2 == 1 else 2
    while m < M:
        m += 2
        prev = vals[-1]
        vals.append(u * (1.0 + u * u) ** (-(m - 2) / 2.0) / (m - 2) + (m - 3) / (m - 2) * prev)
    return vals[-1]


def cutoff_power_integral(I: DyadicInterval, E: IntervalUnion, M: int) -> float:
    """|I|^{-1} int_E chi~_I(x)^M dx in closed form per interval of E."""
    c, L = float(I.center), float(I.length)
    total = 0.0
    for l, r in E.parts:
        u1 = (float(l) - c) / L
        u2 = (float(r) - c) / L
        total += _cutoff_antiderivative(u2, M) - _cutoff_antiderivative(u1, M)
    return total


def size_estimate_rhs(E: IntervalUnion, collection: Sequence[TriTile], M: int) -> float:
    """sup over tri-tiles of |I_P|^{-1} int_E chi~_{I_P}^M."""
    best = 0.0
    for P in collection:
        best = max(best, cutoff_power_integral(P.I, E, M))
    return best


# ---------------------------------------------------------------------------
# Duality witness for the energy (small-scale check).
# ---------------------------------------------------------------------------

def duality_witness(field: CoefficientField, collection: Sequence[TriTile], i: int):
    """From the brute-force energy's optimal selection, build
    c_{P_i} = 2^{-n} (sum |I_T|)^{-1/2} a_{P_i} on the selected tiles.

    Returns (pairing |sum a conj(c)|, energy value, subtree l^2 budget
    report).  With this normalization the extremizing selection gives
    pairing in [energy, 4 energy] and every subtree's sum |c|^2 at most
    4 |I_{T'}| / sum |I_T|, directly from the two threshold constraints.
    """
    if len(collection) > 10:
        raise ValueError("duality check is limited to small collections")
    window = _energy_n_window(field, collection, i)
    if window is None:
        return 0.0, 0.0, {"budget_max": 0.0, "trees": 0}
    best = (0.0, None, None)
    for n in window:
        trees = _valid_trees(field, collection, i, n)
        sel = _best_family_trees(trees, i)
        if not sel:
            continue
        total = sum(float(T.I_T.length) for T in sel)
        val = 2.0**n * math.sqrt(total)
        if val > best[0]:
            best = (val, n, sel)
    energy, n, sel = best
    if sel is None:
        return 0.0, 0.0, {"budget_max": 0.0, "trees": 0}
    total = sum(float(T.I_T.length) for T in sel)
    scale = 2.0**-n / math.sqrt(total)
    pairing = 0.0
    budget_max = 0.0
    for T in sel:
        seen: set[Tile] = set()
        for P in T.members:
            t = P.tile(i)
            if t in seen:
                continue
            seen.add(t)
            a = field.a(P, i)
            pairing += (a * np.conj(scale * a)).real
        for Q in T.members:
            sub = tuple(P for P in T.members if tile_le(P.tile(i), Q.tile(i)))
            csum = sum(
                abs(scale * field.a(P, i)) ** 2
                for P in dict.fromkeys(sub)
            )
            denom = float(Q.I.length) / total
            if denom > 0:
                budget_max = max(budget_max, csum / denom)
    return abs(pairing), energy, {"budget_max": budget_max, "trees": len(sel), "n": n}


def _best_family_trees(trees: list[Tree], i: int) -> Optional[list[Tree]]:
    best_total = 0.0
    best_sel: Optional[list[Tree]] = None

    def rec(start, chosen, acc):
        nonlocal best_total, best_sel
        if acc > best_total:
            best_total = acc
            best_sel = list(chosen)
        for idx in range(start, len(trees)):
            T = trees[idx]
            members = set(T.members)
            if any(members & set(S.members) for S in chosen):
                continue
            if any(not strongly_disjoint(T, S, i) for S in chosen):
                continue
            chosen.append(T)
            rec(idx + 1, chosen, acc + float(T.I_T.length))
            chosen.pop()

    rec(0, [], 0.0)
    return best_sel
