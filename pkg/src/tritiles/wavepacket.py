"""Wave packets adapted to tiles.

The mother profile is frequency-side: psi_hat is a smooth even plateau
supported in [-9/20, 9/20], identically a plateau on [-8/20, 8/20], and
L^2-normalized so that ||psi||_2 = 1.  A packet adapted to P = I x omega is

    Phi_P_hat(xi) = |I|^{1/2} psi_hat((xi - c(omega)) |I|) e^{-2 pi i (xi - c(omega)) x_I}
    Phi_P(x)      = |I|^{-1/2} e^{2 pi i c(omega) x} psi((x - x_I)/|I|)

so supp Phi_P_hat = c(omega) + supp psi_hat / |I| sits inside (9/10) omega.

psi itself has no closed form; it is tabulated once per profile by an
FFT-accelerated cosine transform of psi_hat and interpolated with a cubic
spline.  The profile mandated here (exponential-of-reciprocal plateau)
decays like exp(-c sqrt(y)) with c about 1.1, so the table must reach
y ~ 700 before |psi| falls below 1e-12; the tabulation radius is therefore
much larger than the pairing window (2^6 lengths), and pair() budgets the
truncated tail against the table's own L1 tail integrals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .bumps import PlateauBump
from .dyadic import DyadicInterval
from .tiles import Tile

TWO_PI = 2.0 * np.pi


class ResolutionError(ValueError):
    pass


def approximate_cutoff(I, x):
    """(1 + ((x - x_I)/|I|)^2)^{-1/2}, vectorized over x.

    I may be a DyadicInterval or a (center, length) pair.
    """
    if isinstance(I, DyadicInterval):
        center, length = float(I.center), float(I.length)
    else:
        center, length = float(I[0]), float(I[1])
    x = np.asarray(x, dtype=float)
    return (1.0 + ((x - center) / length) ** 2) ** -0.5


class BumpProfile:
    """Mother profile: psi_hat plateau bump plus a tabulated psi spline."""

    def __init__(
        self,
        plateau: float = 0.40,
        support: float = 0.45,
        table_radius: float = 768.0,
        pair_radius: float = 64.0,
        table_step: float = 2.0**-9,
        fft_log2n: int = 21,
        smoothness_order: int = 10,
    ):
        self.bump = PlateauBump(plateau, support)
        self.support = support
        self.table_radius = table_radius
        self.pair_radius = pair_radius
        self.table_step = table_step
        self.smoothness_order = smoothness_order
        # L2 normalization of psi_hat (Plancherel: ||psi||_2 = ||psi_hat||_2).
        # Trapezoid on a smooth compactly supported integrand is spectrally
        # accurate (all Euler-Maclaurin boundary terms vanish).
        u = np.linspace(-support, support, 1 << 14)
        raw = self.bump(u)
        norm = np.sqrt(np.trapezoid(raw**2, u))
        self._amp = 1.0 / norm
        # Tabulate psi(y) = int psi_hat(u) e^{2 pi i u y} du on [0, R] by a
        # single inverse FFT.  With frequency step du the discrete sum equals
        # sum_k psi(y - k/du) (Poisson summation), and 1/du is chosen so the
        # aliased terms sit where psi has decayed below 1e-25.
        n_fft = 1 << fft_log2n
        du = 1.0 / (n_fft * table_step)
        n_supp = int(np.floor(support / du))
        if (n_supp + 1) * 2 > n_fft or 1.0 / du < 2.0 * table_radius + 64.0:
            raise ValueError("fft grid cannot cover the requested table")
        coeffs = np.zeros(n_fft)
        uu = du * np.arange(n_supp + 1)
        vals = self._amp * self.bump(uu)
        coeffs[: n_supp + 1] = vals
        coeffs[n_fft - n_supp :] = vals[1:][::-1]
        full = du * n_fft * np.fft.ifft(coeffs).real
        n_table = int(np.round(table_radius / table_step)) + 1
        y = table_step * np.arange(n_table)
        table = full[:n_table]
        self._spline = CubicSpline(y, table, extrapolate=False)
        self._psi0 = float(table[0])
        # cumulative tail integrals int_{|t|>y} |psi(t)| dt, for budgeting
        # truncation errors of window-restricted pairings
        absint = np.abs(table)
        rev = np.concatenate([[0.0], np.cumsum((absint[:-1] + absint[1:]) * (table_step / 2))])
        self._tail_l1_table = 2.0 * (rev[-1] - rev)

    def psi_hat(self, u):
        """Normalized frequency-side profile (exact evaluation, hard zero
        outside the support)."""
        return self._amp * self.bump(np.asarray(u, dtype=float))

    def psi(self, y):
        """Tabulated space-side profile; even, real, zero beyond the table
        radius (where the true |psi| is below 1e-12)."""
        y = np.abs(np.asarray(y, dtype=float))
        out = self._spline(y)
        return np.nan_to_num(out, nan=0.0)

    def tail_l1(self, y: float) -> float:
        """int_{|t| > y} |psi(t)| dt, from the table."""
        if y >= self.table_radius:
            return 0.0
        idx = max(0, int(np.floor(y / self.table_step)))
        return float(self._tail_l1_table[idx])


_default_profile: Optional[BumpProfile] = None


def default_profile() -> BumpProfile:
    global _default_profile
    if _default_profile is None:
        _default_profile = BumpProfile()
    return _default_profile


@dataclass(frozen=True)
class WavePacket:
    tile: Tile
    profile: BumpProfile

    @property
    def length(self) -> float:
        return float(self.tile.I.length)

    @property
    def x_center(self) -> float:
        return float(self.tile.I.center)

    @property
    def freq_center(self) -> float:
        return float(self.tile.omega.center)

    @property
    def freq_support(self) -> tuple[float, float]:
        """Support of Phi_hat: inside (9/10) omega."""
        half = self.profile.support / self.length
        return (self.freq_center - half, self.freq_center + half)

    @property
    def max_frequency(self) -> float:
        lo, hi = self.freq_support
        return max(abs(lo), abs(hi))

    @property
    def window(self) -> tuple[float, float]:
        """Certified pairing window (2^6 lengths by default)."""
        r = self.profile.pair_radius * self.length
        return (self.x_center - r, self.x_center + r)

    @property
    def numerical_support(self) -> tuple[float, float]:
        """Where the packet is numerically nonzero (the table radius)."""
        r = self.profile.table_radius * self.length
        return (self.x_center - r, self.x_center + r)

    def nyquist_dx(self) -> float:
        """Largest grid step that still resolves the packet's oscillation."""
        return 1.0 / (2.0 * self.max_frequency + 1e-12)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        y = (x - self.x_center) / self.length
        vals = self.profile.psi(y) / np.sqrt(self.length)
        return vals * np.exp(2j * np.pi * self.freq_center * x)

    def evaluate_hat(self, xi):
        xi = np.asarray(xi, dtype=float)
        arg = (xi - self.freq_center) * self.length
        vals = np.sqrt(self.length) * self.profile.psi_hat(arg)
        phase = np.exp(-2j * np.pi * (xi - self.freq_center) * self.x_center)
        return vals * phase


def make_wave_packet(tile: Tile, profile: Optional[BumpProfile] = None, dx: Optional[float] = None) -> WavePacket:
    wp = WavePacket(tile, profile or default_profile())
    if dx is not None and dx > wp.nyquist_dx():
        raise ResolutionError(
            f"grid step {dx} cannot resolve frequencies up to {wp.max_frequency}"
        )
    return wp


# ---------------------------------------------------------------------------
# Sampled functions and pairings.
# ---------------------------------------------------------------------------

@dataclass
class SampledFunction:
    """Complex samples on a uniform grid x0 + n*dx, n = 0..len-1."""

    x0: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)

    @property
    def grid(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(len(self.values))

    @property
    def x1(self) -> float:
        return self.x0 + self.dx * (len(self.values) - 1)

    def norm2(self) -> float:
        return float(np.sqrt(self.dx * np.sum(np.abs(self.values) ** 2)))

    def dft(self) -> tuple[np.ndarray, np.ndarray]:
        """Continuum-normalized DFT: returns (frequencies, coefficients)
        with coefficients ~ dx * sum f(x_n) e^{-2 pi i xi x_n}."""
        n = len(self.values)
        freqs = np.fft.fftfreq(n, d=self.dx)
        coeffs = self.dx * np.fft.fft(self.values) * np.exp(
            -2j * np.pi * freqs * self.x0
        )
        return np.fft.fftshift(freqs), np.fft.fftshift(coeffs)

    @staticmethod
    def from_callable(fn: Callable, x0: float, x1: float, dx: float) -> "SampledFunction":
        n = int(np.round((x1 - x0) / dx)) + 1
        x = x0 + dx * np.arange(n)
        return SampledFunction(x0, dx, fn(x))


def pair(f: SampledFunction, wp: WavePacket, with_info: bool = False):
    """Quadrature of <f, Phi_P> = int f conj(Phi_P) on f's grid.

    Integrates over the overlap of f's grid with the packet's numerical
    support.  Raises ResolutionError if the grid cannot resolve the packet;
    reports a coverage flag when the certified pairing window is not fully
    inside the grid, and an error bound for the truncated tail.
    """
    if f.dx > wp.nyquist_dx():
        raise ResolutionError(
            f"grid step {f.dx:g} too coarse for packet frequencies up to {wp.max_frequency:g}"
        )
    slo, shi = wp.numerical_support
    lo = max(0, int(np.ceil((slo - f.x0) / f.dx)))
    hi = min(len(f.values) - 1, int(np.floor((shi - f.x0) / f.dx)))
    if hi < lo:
        value = 0.0 + 0.0j
        info = {"coverage_flag": True, "error_bound": 0.0}
        return (value, info) if with_info else value
    x = f.x0 + f.dx * np.arange(lo, hi + 1)
    wvals = wp.evaluate(x)
    value = f.dx * np.sum(f.values[lo : hi + 1] * np.conj(wvals))
    if not with_info:
        return value
    wlo, whi = wp.window
    covered = (f.x0 <= wlo) and (f.x1 >= whi)
    fmax = float(np.max(np.abs(f.values))) if len(f.values) else 0.0
    # truncated-tail budget per side: |int f conj(Phi)| outside the grid is
    # at most sup|f| * |I|^{1/2} * (half the two-sided L1 tail of psi)
    r_lo = max(0.0, (wp.x_center - x[0]) / wp.length)
    r_hi = max(0.0, (x[-1] - wp.x_center) / wp.length)
    tail = 0.5 * fmax * wp.length ** 0.5 * (
        wp.profile.tail_l1(r_lo) + wp.profile.tail_l1(r_hi)
    )
    info = {"coverage_flag": not covered, "error_bound": float(tail)}
    return value, info


def pair_frequency(f: SampledFunction, wp: WavePacket) -> complex:
    """<f, Phi_P> evaluated on the frequency side from f's DFT (an
    independent route used by the Plancherel consistency checks)."""
    freqs, coeffs = f.dft()
    lo, hi = wp.freq_support
    mask = (freqs >= lo) & (freqs <= hi)
    dxi = freqs[1] - freqs[0]
    return complex(dxi * np.sum(coeffs[mask] * np.conj(wp.evaluate_hat(freqs[mask]))))


def pair_packets(wp1: WavePacket, wp2: WavePacket, nodes: int = 2048) -> complex:
    """<Phi_1, Phi_2> by frequency-side quadrature over the support overlap.

    Exact zero when the (9/10)-supports are disjoint; otherwise a smooth
    compactly supported integrand integrated by trapezoid with enough
    nodes to resolve the e^{-2 pi i xi (x_1 - x_2)} oscillation.
    """
    lo = max(wp1.freq_support[0], wp2.freq_support[0])
    hi = min(wp1.freq_support[1], wp2.freq_support[1])
    if lo >= hi:
        return 0.0 + 0.0j
    sep = abs(wp1.x_center - wp2.x_center)
    n = max(nodes, int(16 * (hi - lo) * sep) + 64)
    xi = np.linspace(lo, hi, n + 1)
    vals = wp1.evaluate_hat(xi) * np.conj(wp2.evaluate_hat(xi))
    return complex(np.trapezoid(vals, xi))


def verify_decay(wp: WavePacket, M: int, n_samples: int = 65537) -> float:
    """C_M = sup |Phi_P(x)| |I_P|^{1/2} / chi_tilde^M over the packet's
    numerical support.

    The mandated profile decays subexponentially (exp(-c sqrt(y))), so every
    polynomial order M has a finite constant but C_M grows fast in M; the
    values are honest and recorded as-is.
    """
    if M < 0:
        raise ValueError("M must be nonnegative")
    flagged = M > wp.profile.smoothness_order
    lo, hi = wp.numerical_support
    x = np.linspace(lo, hi, n_samples)
    chi = approximate_cutoff((wp.x_center, wp.length), x)
    ratio = np.abs(wp.evaluate(x)) * np.sqrt(wp.length) / chi**M
    c = float(np.max(ratio))
    if flagged:
        import warnings

        warnings.warn(
            f"decay order M={M} beyond certified smoothness {wp.profile.smoothness_order}",
            RuntimeWarning,
        )
    return c
