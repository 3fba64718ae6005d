"""Singular symbols and their Whitney-square decomposition.

A symbol m(xi_a, xi_b) is smooth away from the diagonal Gamma = {xi_a =
xi_b} with derivative bounds |d^alpha m| <= C dist(Gamma, xi)^{-|alpha|}.
Away from Gamma it is resolved by squares Q = Q_a x Q_b from the nine
shifted dyadic grids with dist(Q, Gamma) comparable to C0 |Q|; the attached
bumps phi_Q form a partition of unity on the covered band.

Selection rule (exact rational test):

    C0/2 * |Q| <= dist(Q, Gamma) <= 2*C0 * |Q|,

with dist the gap between the closed component intervals.  For C0 >= 4 the
6/10-cores of the selected squares cover every point off the diagonal:
choose the scale 2^j in (d/(2 C0), d/C0] for d = |xi_a - xi_b| and, per
coordinate, the one of the three shifts that keeps the point at distance
>= |Q|/3 from the cell endpoints.  Then the gap lies in
[(C0 - 2) 2^j, d] which is inside the selection band precisely when
C0 >= 4.

The partition bump of a square normalizes against *all* squares of the
family whose supports meet the point (a local, scale-bounded enumeration),
so its values do not depend on any enumeration window.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .bumps import AdaptedBump, PlateauBump
from .dyadic import SHIFTS, DyadicInterval, ShiftedDyadicCube

DEFAULT_C0 = 2**10
DEFAULT_N = 20
DEFAULT_M_MAX = 8
QUAD_SIDE = 2**8

# 1D cutoff for partition bumps: 1 on the central 6/10, supported on 8/10
# of a unit cell (half-widths 0.3 and 0.4).
_ETA = PlateauBump(plateau=0.30, support=0.40)
# basis bump adapted to an interval, supported on its 9/10 dilation
_BASIS = PlateauBump(plateau=0.40, support=0.45)


# ---------------------------------------------------------------------------
# Symbols.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingularSymbol:
    """Evaluator m(xi_a, xi_b), smooth away from the diagonal."""

    name: str
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    smooth_off_diagonal: bool = True

    def __call__(self, xi_a, xi_b):
        xi_a = np.asarray(xi_a, dtype=float)
        xi_b = np.asarray(xi_b, dtype=float)
        return np.asarray(self.fn(xi_a, xi_b), dtype=complex)

    def derivative_bound(self, samples: Sequence[tuple[float, float]], max_order: int = 3,
                         rel_step: float = 1e-3) -> dict[int, float]:
        """Recorded constants C_k = max |d^alpha m| * dist^{|alpha|} over the
        samples, |alpha| = k <= max_order, by central finite differences.

        Sample points too close to the diagonal for a stable stencil are
        skipped (the stencil must stay on one side of the diagonal).
        """
        out = {k: 0.0 for k in range(max_order + 1)}
        for xa, xb in samples:
            d = abs(xa - xb)
            if d == 0:
                continue
            h = d * rel_step
            for ka in range(max_order + 1):
                for kb in range(max_order + 1 - ka):
                    val = _central_diff_2d(self, xa, xb, ka, kb, h)
                    k = ka + kb
                    out[k] = max(out[k], abs(val) * d**k)
        return out


def _central_diff_2d(m, xa, xb, ka, kb, h):
    ia = np.arange(ka + 1)
    ib = np.arange(kb + 1)
    wa = np.array([math.comb(ka, i) * (-1.0) ** i for i in ia])
    wb = np.array([math.comb(kb, i) * (-1.0) ** i for i in ib])
    pa = xa + (ka / 2.0 - ia) * h
    pb = xb + (kb / 2.0 - ib) * h
    vals = m(pa[:, None], pb[None, :])
    return (wa @ vals @ wb) / h ** (ka + kb)


def _sym_one(xa, xb):
    return np.ones(np.broadcast(xa, xb).shape, dtype=complex)


def _sym_halfplane(xa, xb):
    return (xa < xb).astype(complex)


def _sym_modulus_osc(xa, xb):
    d = np.abs(xa - xb)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(1j * np.log(d))
    return np.where(d > 0, out, 0.0)


def _sym_sign(xa, xb):
    return np.exp(0.25j * np.pi * np.sign(xa - xb))


BUILTIN_SYMBOLS: dict[str, SingularSymbol] = {
    "one": SingularSymbol("one", _sym_one),
    "halfplane": SingularSymbol("halfplane", _sym_halfplane, smooth_off_diagonal=False),
    "modulus-osc": SingularSymbol("modulus-osc", _sym_modulus_osc),
    "sign": SingularSymbol("sign", _sym_sign, smooth_off_diagonal=False),
}


# ---------------------------------------------------------------------------
# Whitney squares.
# ---------------------------------------------------------------------------

def diagonal_gap(Q: ShiftedDyadicCube) -> Fraction:
    """dist(Q, diagonal) = min over the closed square of |xi_a - xi_b|,
    i.e. the gap between the closed component intervals.  Exact."""
    if Q.n != 2:
        raise ValueError("Whitney squares are two-dimensional")
    a, b = Q.components
    return max(Fraction(0), a.left - b.right, b.left - a.right)


def is_whitney(Q: ShiftedDyadicCube, C0: int) -> bool:
    gap = diagonal_gap(Q)
    return C0 * Q.side <= 2 * gap and gap <= 2 * C0 * Q.side


@dataclass(frozen=True)
class WhitneySquare:
    Q: ShiftedDyadicCube
    C0: int = DEFAULT_C0

    def __post_init__(self):
        if not is_whitney(self.Q, self.C0):
            raise ValueError(
                f"square {self.Q.encode()} violates dist ~ C0|Q| (C0={self.C0})"
            )

    @property
    def side(self) -> Fraction:
        return self.Q.side

    @property
    def k(self) -> int:
        """log2 of the side."""
        return self.Q.j

    def center(self) -> tuple[float, float]:
        ca, cb = self.Q.center
        return (float(ca), float(cb))

    def eta(self, xi_a, xi_b) -> np.ndarray:
        """Unnormalized cutoff: 1 on the 6/10-core, 0 outside 8/10 Q."""
        ca, cb = self.Q.center
        s = float(self.side)
        va = (np.asarray(xi_a, dtype=float) - float(ca)) / s
        vb = (np.asarray(xi_b, dtype=float) - float(cb)) / s
        return _ETA(va) * _ETA(vb)


def _axis_candidates(x: float, j: int, margin: float = 0.5) -> list[DyadicInterval]:
    """Scale-j intervals (all three shifts) with x within margin*side of the
    center."""
    out = []
    side = 2.0**j
    sign = 1 if j % 2 == 0 else -1
    for s in SHIFTS:
        base = x / side - sign * float(s)
        for k in (math.floor(base - margin), math.floor(base), math.floor(base + margin)):
            I = DyadicInterval(j, k, s)
            if abs(x - float(I.center)) <= margin * side:
                out.append(I)
    return list(dict.fromkeys(out))


def local_family(xi_a: float, xi_b: float, C0: int = DEFAULT_C0) -> list[WhitneySquare]:
    """All Whitney squares (any shift, any scale) whose 8/10-support can
    contain (xi_a, xi_b).  Locally finite: scales are pinned to the
    distance from the diagonal."""
    d = abs(xi_a - xi_b)
    if d == 0.0:
        return []
    # support in 8/10 Q and selection band pin the scale: the support's gap
    # differs from the square's gap by at most |Q|, so
    # (C0/2 - 1)|Q| <= d <= (2 C0 + 1)|Q|.
    j_lo = math.floor(math.log2(d / (2 * C0 + 1)))
    j_hi = math.ceil(math.log2(d / max(C0 / 2 - 1, 1)))
    out = []
    for j in range(j_lo, j_hi + 1):
        for Ia in _axis_candidates(xi_a, j, margin=0.40):
            for Ib in _axis_candidates(xi_b, j, margin=0.40):
                Q = ShiftedDyadicCube(j, (Ia.k, Ib.k), (Ia.sigma, Ib.sigma))
                if is_whitney(Q, C0):
                    out.append(WhitneySquare(Q, C0))
    return list(dict.fromkeys(out))


def _axis_overlapping(lo: float, hi: float, j: int, margin: float = 0.40) -> list[DyadicInterval]:
    """Scale-j intervals (all shifts) whose margin*side neighborhood of the
    center meets [lo, hi]."""
    out = []
    side = 2.0**j
    sign = 1 if j % 2 == 0 else -1
    for s in SHIFTS:
        k_lo = math.floor((lo - margin * side) / side - sign * float(s) - 0.5)
        k_hi = math.ceil((hi + margin * side) / side - sign * float(s) + 0.5)
        for k in range(k_lo, k_hi + 1):
            I = DyadicInterval(j, k, s)
            c = float(I.center)
            if c + margin * side >= lo and c - margin * side <= hi:
                out.append(I)
    return out


def family_near_square(W: WhitneySquare, scale_slack: int = 3) -> list[WhitneySquare]:
    """All Whitney squares whose 8/10-supports can meet the support of W.
    The selection band pins their scales to within scale_slack levels."""
    (ca, cb) = W.Q.center
    r = 0.4 * float(W.side)
    out = []
    for j in range(W.k - scale_slack, W.k + scale_slack + 1):
        pad = 0.4 * 2.0**j
        for Ia in _axis_overlapping(float(ca) - r - pad, float(ca) + r + pad, j):
            for Ib in _axis_overlapping(float(cb) - r - pad, float(cb) + r + pad, j):
                Q = ShiftedDyadicCube(j, (Ia.k, Ib.k), (Ia.sigma, Ib.sigma))
                if is_whitney(Q, W.C0):
                    out.append(WhitneySquare(Q, W.C0))
    return list(dict.fromkeys(out))


def partition_denominator(xi_a, xi_b, C0: int = DEFAULT_C0,
                          candidates: Optional[Sequence[WhitneySquare]] = None):
    """Sum of eta over the (local) family, vectorized over points."""
    xi_a = np.asarray(xi_a, dtype=float)
    xi_b = np.asarray(xi_b, dtype=float)
    if candidates is None:
        flat_a, flat_b = xi_a.ravel(), xi_b.ravel()
        seen: dict[WhitneySquare, None] = {}
        for pa, pb in zip(flat_a, flat_b):
            for W in local_family(float(pa), float(pb), C0):
                seen[W] = None
        candidates = list(seen)
    den = np.zeros(np.broadcast(xi_a, xi_b).shape, dtype=float)
    for W in candidates:
        den = den + W.eta(xi_a, xi_b)
    return den, list(candidates)


def partition_bump(W: WhitneySquare, xi_a, xi_b,
                   candidates: Optional[Sequence[WhitneySquare]] = None) -> np.ndarray:
    """phi_Q = eta_Q / sum_family eta, the partition bump of one square.

    Smooth, supported in 8/10 Q; the denominator is >= 1 on supp eta_Q
    because the cores of the family cover the band.
    """
    num = W.eta(xi_a, xi_b)
    den, _ = partition_denominator(xi_a, xi_b, W.C0, candidates)
    out = np.zeros_like(num)
    mask = num > 0.0
    out[mask] = num[mask] / den[mask]
    return out


def partition_sum(xi_a, xi_b, C0: int = DEFAULT_C0) -> float:
    """Sum of all partition bumps at one point: 1 on the covered band, 0 on
    the diagonal."""
    fam = local_family(float(xi_a), float(xi_b), C0)
    if not fam:
        return 0.0
    den, cand = partition_denominator(np.asarray(xi_a), np.asarray(xi_b), C0)
    total = 0.0
    for W in fam:
        num = float(W.eta(xi_a, xi_b))
        if num > 0.0:
            total += num / float(den)
    return total


def whitney_cover(gamma: int, j_range: Iterable[int], window, C0: int = DEFAULT_C0) -> list[WhitneySquare]:
    """Whitney squares of the diagonal with scales in j_range meeting the
    window (a pair of (lo, hi) rational pairs).

    gamma is 1 for the (xi_1, xi_2) symbol plane and 2 for (xi_2, xi_3);
    the geometry is the same diagonal either way.  Warns when the window
    contains points whose distance band is not covered by j_range.
    """
    if gamma not in (1, 2):
        raise ValueError("gamma must be 1 or 2")
    if C0 < 4:
        raise ValueError("C0 >= 4 is required for the cores to cover")
    j_range = sorted(j_range)
    window = [(Fraction(lo), Fraction(hi)) for lo, hi in window]
    if len(window) != 2:
        raise ValueError("window must be a 2D box")
    out = []
    from .dyadic import enumerate_grid

    for sa in SHIFTS:
        for sb in SHIFTS:
            for Q in enumerate_grid((sa, sb), j_range, window):
                if is_whitney(Q, C0):
                    out.append(WhitneySquare(Q, C0))
    lo_d, hi_d = coverage_band(j_range, C0)
    max_d = max(abs(window[0][1] - window[1][0]), abs(window[1][1] - window[0][0]))
    if max_d > hi_d:
        warnings.warn(
            f"window reaches distance {float(max_d):g} from the diagonal but "
            f"j_range only certifies up to {float(hi_d):g}; coverage gap",
            RuntimeWarning,
        )
    return out


def coverage_band(j_range: Sequence[int], C0: int) -> tuple[Fraction, Fraction]:
    """Distances d from the diagonal whose covering scale floor(log2(d/C0))
    lies inside j_range; on this band the returned cover's bumps sum to 1."""
    j_lo, j_hi = min(j_range), max(j_range)
    return (C0 * Fraction(2) ** j_lo, C0 * Fraction(2) ** (j_hi + 1))


# ---------------------------------------------------------------------------
# Region split.
# ---------------------------------------------------------------------------

def region_split(Q: ShiftedDyadicCube, Qp: ShiftedDyadicCube, threshold: int = 1000) -> str:
    """Scale comparison of a square pair: "I" when Q' is much larger,
    "III" when much smaller, "II" otherwise."""
    k1 = Q.j if isinstance(Q, ShiftedDyadicCube) else Q.Q.j
    k2 = Qp.j if isinstance(Qp, ShiftedDyadicCube) else Qp.Q.j
    if k2 - k1 >= threshold:
        return "I"
    if k1 - k2 >= threshold:
        return "III"
    return "II"


# ---------------------------------------------------------------------------
# Fourier coefficients.
# ---------------------------------------------------------------------------

def _square_grid(W: WhitneySquare, n_side: int):
    """Tensor quadrature grid over the support 8/10 Q with trapezoid
    weights; the integrand vanishes to all orders at the boundary, so the
    rule is spectrally accurate."""
    (ca, cb) = W.Q.center
    h = float(W.side) * 0.8
    xa = float(ca) + h * (np.arange(n_side + 1) / n_side - 0.5)
    xb = float(cb) + h * (np.arange(n_side + 1) / n_side - 0.5)
    w = np.full(n_side + 1, h / n_side)
    w[0] *= 0.5
    w[-1] *= 0.5
    return xa, xb, w


def _integrand_grid(m: SingularSymbol, W: WhitneySquare, n_side: int, ell: int = 0):
    xa, xb, w = _square_grid(W, n_side)
    A, B = np.meshgrid(xa, xb, indexing="ij")
    vals = m(A, B) * partition_bump(W, A, B, candidates=family_near_square(W))
    if ell:
        side = float(W.side)
        vals = vals * ((B - A) / side) ** ell / factorial(ell)
    return xa, xb, w, vals


def fourier_table(m: SingularSymbol, W: WhitneySquare, N: int = DEFAULT_N,
                  ell: int = 0, n_side: int = QUAD_SIDE) -> np.ndarray:
    """All coefficients for indices in [-N, N]^2 at once.

    Entry [i, j] is the coefficient at n = (i - N, j - N):

        (1/|Q|^2) int m(xi_a, xi_b) phi_Q ((xi_b - xi_a)/|Q|)^ell / ell!
                  e^{-2 pi i (n_a xi_a + n_b xi_b)/|Q|} dxi_a dxi_b,

    computed as a weighted double matrix product over the tensor grid.
    """
    xa, xb, w, vals = _integrand_grid(m, W, n_side, ell)
    side = float(W.side)
    ns = np.arange(-N, N + 1)
    Ea = np.exp(-2j * np.pi * np.outer(ns, xa) / side) * w[None, :]
    Eb = np.exp(-2j * np.pi * np.outer(ns, xb) / side) * w[None, :]
    return (Ea @ vals @ Eb.T) / side**2


def fourier_coeff(m: SingularSymbol, W: WhitneySquare, n: tuple[int, int],
                  n_side: int = QUAD_SIDE, with_error: bool = False):
    """One coefficient C_n^{Q}; the error estimate is a Richardson check
    against the doubled grid."""
    n1, n2 = n
    side = float(W.side)

    def run(ns):
        xa, xb, w, vals = _integrand_grid(m, W, ns)
        ea = np.exp(-2j * np.pi * n1 * xa / side) * w
        eb = np.exp(-2j * np.pi * n2 * xb / side) * w
        return complex(ea @ vals @ eb) / side**2

    value = run(n_side)
    if not with_error:
        return value
    refined = run(2 * n_side)
    return refined, abs(refined - value)


def fourier_coeff_taylor(m: SingularSymbol, W: WhitneySquare, ell: int, s: tuple[int, int],
                         n_side: int = QUAD_SIDE, with_error: bool = False):
    """Coefficient C_s^{Q, ell} with the ((xi_b - xi_a)/|Q|)^ell / ell!
    factor in the integrand."""
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    s1, s2 = s
    side = float(W.side)

    def run(ns):
        xa, xb, w, vals = _integrand_grid(m, W, ns, ell)
        ea = np.exp(-2j * np.pi * s1 * xa / side) * w
        eb = np.exp(-2j * np.pi * s2 * xb / side) * w
        return complex(ea @ vals @ eb) / side**2

    value = run(n_side)
    if not with_error:
        return value
    refined = run(2 * n_side)
    return refined, abs(refined - value)


def reconstruct(table: np.ndarray, W: WhitneySquare, xi_a, xi_b) -> np.ndarray:
    """Evaluate the truncated double Fourier series at points inside the
    square (the exponentials are |Q|-periodic; the support fits in one
    fundamental domain)."""
    N = (table.shape[0] - 1) // 2
    side = float(W.side)
    ns = np.arange(-N, N + 1)
    xi_a = np.asarray(xi_a, dtype=float)
    xi_b = np.asarray(xi_b, dtype=float)
    Ea = np.exp(2j * np.pi * np.multiply.outer(xi_a, ns) / side)
    Eb = np.exp(2j * np.pi * np.multiply.outer(xi_b, ns) / side)
    return np.einsum("...m,mn,...n->...", Ea, table, Eb)


def decay_fit(table: np.ndarray) -> dict:
    """Least-squares fit log|C_n| ~ log C - M log(1 + |n1| + |n2|)."""
    N = (table.shape[0] - 1) // 2
    ns = np.arange(-N, N + 1)
    wt = 1.0 + np.abs(ns)[:, None] + np.abs(ns)[None, :]
    mags = np.abs(table)
    mask = mags > 1e-300
    x = np.log(wt[mask])
    y = np.log(mags[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return {"C": float(np.exp(intercept)), "M_fit": float(-slope), "residual": resid}


def decay_constant(table: np.ndarray, order: int = 6) -> float:
    """Smallest C with |C_n| <= C (1 + |n1| + |n2|)^{-order} over the table."""
    N = (table.shape[0] - 1) // 2
    ns = np.arange(-N, N + 1)
    wt = 1.0 + np.abs(ns)[:, None] + np.abs(ns)[None, :]
    return float(np.max(np.abs(table) * wt**order))


# ---------------------------------------------------------------------------
# Taylor splitting.
# ---------------------------------------------------------------------------

def taylor_split(bump: AdaptedBump, M: int, xi1: float, xi2: float):
    """Expand bump(xi2) around the midpoint (xi1 + xi2)/2.

    Returns (term ell=0, [terms ell=1..M-1], remainder, lagrange_bound)
    where remainder = bump(xi2) - all listed terms (so reconstruction is
    exact by construction) and the bound is sup|bump^{(M)}| |h|^M / M! with
    h = (xi2 - xi1)/2, valid for every intermediate point.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    c = 0.5 * (xi1 + xi2)
    h = 0.5 * (xi2 - xi1)
    terms = [complex(bump(np.asarray(c), r)) * h**r / factorial(r) for r in range(M)]
    total = sum(terms)
    remainder = complex(bump(np.asarray(xi2))) - total
    sup_m = bump_derivative_sup(bump, M)
    bound = sup_m * abs(h) ** M / factorial(M)
    return terms[0], terms[1:], remainder, bound


def bump_derivative_sup(bump: AdaptedBump, order: int, n: int = 2049) -> float:
    lo, hi = bump.support_interval()
    u = np.linspace(lo, hi, n)
    return float(np.max(np.abs(bump(u, order))))


# ---------------------------------------------------------------------------
# Rescaled derivative bumps.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivativeBump:
    """2^{k ell} phi^{(ell)} for phi adapted to an interval of length 2^k:
    again a bump adapted to the same interval, with ell shifted into the
    profile.  Calling with order r gives scale^{ell} phi^{(ell + r)}."""

    base: AdaptedBump
    ell: int

    def __call__(self, u, order: int = 0):
        return self.base(u, order + self.ell) * self.base.scale**self.ell

    def support_interval(self):
        return self.base.support_interval()

    @property
    def scale(self):
        return self.base.scale

    def adapted_constants(self, max_order: int = 2, n_samples: int = 2049) -> list[float]:
        lo, hi = self.support_interval()
        u = np.linspace(lo, hi, n_samples)
        return [
            float(np.max(np.abs(self(u, r))) * self.base.scale**r)
            for r in range(max_order + 1)
        ]


def basis_bump(I: DyadicInterval, n: int = 0) -> AdaptedBump:
    """Modulated bump adapted to I, supported in (9/10) I."""
    return AdaptedBump(_BASIS, float(I.center), float(I.length), n)


def rescaled_derivative_bump(Q1p: DyadicInterval, n1: int, ell: int) -> DerivativeBump:
    """The function 2^{k ell} phi^{(ell)}_{Q1', n, 1} for |Q1'| = 2^k."""
    from .bumps import MAX_ORDER

    if ell < 0:
        raise ValueError("ell must be nonnegative")
    if ell + 2 > MAX_ORDER:
        warnings.warn(
            f"ell={ell} leaves fewer than two certified derivative orders",
            RuntimeWarning,
        )
    return DerivativeBump(basis_bump(Q1p, n1), ell)


# ---------------------------------------------------------------------------
# The inner-sum symbol at a fixed scale gap and its derivative check.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InnerSumSymbol:
    """m~_# : sum over square pairs (Q, Q') with k2 - k1 = # of

        phi_{Q1,s,1}(xi1) phi_{Q2,s,2}(xi2)
        * 2^{k2 M} phi^{(M)}_{Q1',n,1}(xi_theta) * phi_{Q2',n,2}(xi3),

    with xi_theta = (1 - theta/2) xi2 + (theta/2) xi1.  The pair sum
    factorizes per scale, and each factor is a locally finite sum over the
    Whitney family, so evaluation enumerates candidates around the point.
    """

    gap: int
    s: tuple[int, int] = (0, 0)
    n: tuple[int, int] = (0, 0)
    M: int = 5
    theta: float = 1.0
    C0: int = DEFAULT_C0
    k1_range: tuple[int, int] = (-40, 40)

    def _pair_factor(self, k1: int, xi1: float, xi2: float) -> complex:
        total = 0.0 + 0.0j
        for Ia in _axis_candidates(xi1, k1, margin=0.45):
            fa = basis_bump(Ia, self.s[0])
            va = complex(fa(np.asarray(xi1)))
            if va == 0.0:
                continue
            for Ib in _axis_candidates(xi2, k1, margin=0.45):
                Q = ShiftedDyadicCube(k1, (Ia.k, Ib.k), (Ia.sigma, Ib.sigma))
                if not is_whitney(Q, self.C0):
                    continue
                total += va * complex(basis_bump(Ib, self.s[1])(np.asarray(xi2)))
        return total

    def _primed_factor(self, k2: int, xi_th: float, xi3: float) -> complex:
        total = 0.0 + 0.0j
        for Ia in _axis_candidates(xi_th, k2, margin=0.45):
            g = DerivativeBump(basis_bump(Ia, self.n[0]), self.M)
            va = complex(g(np.asarray(xi_th)))
            if va == 0.0:
                continue
            for Ib in _axis_candidates(xi3, k2, margin=0.45):
                Qp = ShiftedDyadicCube(k2, (Ia.k, Ib.k), (Ia.sigma, Ib.sigma))
                if not is_whitney(Qp, self.C0):
                    continue
                total += va * complex(basis_bump(Ib, self.n[1])(np.asarray(xi3)))
        return total

    def __call__(self, xi1: float, xi2: float, xi3: float) -> complex:
        xi_th = (1.0 - 0.5 * self.theta) * xi2 + 0.5 * self.theta * xi1
        d12 = abs(xi1 - xi2)
        if d12 == 0.0:
            return 0.0 + 0.0j
        # only scales with a Whitney square containing (xi1, xi2) contribute
        k_lo = max(self.k1_range[0], math.floor(math.log2(d12 / (2 * self.C0 + 1))))
        k_hi = min(self.k1_range[1], math.ceil(math.log2(d12 / (self.C0 / 2 - 1))))
        total = 0.0 + 0.0j
        for k1 in range(k_lo, k_hi + 1):
            a = self._pair_factor(k1, xi1, xi2)
            if a == 0.0:
                continue
            total += a * self._primed_factor(k1 + self.gap, xi_th, xi3)
        return total


def _dist_to_diagonal_3d(xi1, xi2, xi3) -> float:
    # Euclidean distance to the line xi1 = xi2 = xi3
    mean = (xi1 + xi2 + xi3) / 3.0
    return math.sqrt((xi1 - mean) ** 2 + (xi2 - mean) ** 2 + (xi3 - mean) ** 2)


def remainder_symbol_check(gap: int, samples: Sequence[tuple[float, float, float]],
                           max_order: int = 2, s: tuple[int, int] = (0, 0),
                           n: tuple[int, int] = (0, 0), M: int = 5,
                           C0: int = DEFAULT_C0,
                           k1_range: tuple[int, int] = (-40, 40)) -> dict:
    """Max over samples and |alpha| <= max_order of

        |d^alpha m~_#(xi)| * dist(Gamma, xi)^{|alpha|} / 2^{#|alpha|}

    by central finite differences.  Points whose stencil would cross the
    scale of the nearest square pair are excluded and counted.
    """
    sym = InnerSumSymbol(gap, s, n, M, 1.0, C0, k1_range)
    ratios = {k: 0.0 for k in range(max_order + 1)}
    excluded = 0
    for xi1, xi2, xi3 in samples:
        d = _dist_to_diagonal_3d(xi1, xi2, xi3)
        if d == 0.0:
            excluded += 1
            continue
        # the symbol varies on the transition bands of bumps adapted to
        # the small square, whose side is ~ |xi2 - xi1| / (2 C0)
        h = min(abs(xi2 - xi1), d) / (2 * C0) * 1e-2
        if h == 0.0:
            excluded += 1
            continue
        for alpha in _multi_indices_3d(max_order):
            k = sum(alpha)
            val = _central_diff_3d(sym, (xi1, xi2, xi3), alpha, h)
            ratios[k] = max(ratios[k], abs(val) * d**k / 2.0 ** (gap * k))
    return {"ratios": ratios, "excluded": excluded, "gap": gap}


def _multi_indices_3d(max_order: int):
    for k1 in range(max_order + 1):
        for k2 in range(max_order + 1 - k1):
            for k3 in range(max_order + 1 - k1 - k2):
                yield (k1, k2, k3)


def _central_diff_3d(fn, point, alpha, h) -> complex:
    grids = []
    weights = []
    for x, k in zip(point, alpha):
        i = np.arange(k + 1)
        weights.append(np.array([math.comb(k, m) * (-1.0) ** m for m in i]))
        grids.append(x + (k / 2.0 - i) * h)
    total = 0.0 + 0.0j
    for i1, w1 in enumerate(weights[0]):
        for i2, w2 in enumerate(weights[1]):
            for i3, w3 in enumerate(weights[2]):
                total += w1 * w2 * w3 * fn(grids[0][i1], grids[1][i2], grids[2][i3])
    return total / h ** sum(alpha)
