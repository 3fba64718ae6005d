"""Smooth compactly supported plateau bumps with evaluable derivatives.

The building block is the standard smooth step

    s(x) = h(x) / (h(x) + h(1-x)),      h(x) = exp(-1/x) for x > 0,

which is 0 for x <= 0, 1 for x >= 1 and C^infinity.  Derivatives of any
order are generated symbolically once (sympy) and evaluated vectorized;
outside a tiny margin around the transition the derivatives are below
1e-60 and are clamped to their limit values, which sidesteps the 0*inf
pitfalls of evaluating exp(-1/x) expressions at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np
import sympy as sp

MAX_ORDER = 10

# below this distance from the transition endpoints all derivatives up to
# MAX_ORDER are < exp(-1/margin) * margin^(-2*MAX_ORDER) * MAX_ORDER! < 1e-60
_MARGIN = 1.0 / 256.0


@lru_cache(maxsize=None)
def _step_lambdified(order: int):
    x = sp.Symbol("x")
    h = sp.exp(-1 / x)
    hm = sp.exp(-1 / (1 - x))
    expr = h / (h + hm)
    expr = sp.diff(expr, x, order)
    return sp.lambdify(x, expr, modules="numpy")


def smooth_step(x, order: int = 0):
    """s^(order)(x), vectorized.  order 0 gives the step itself."""
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"step derivatives certified up to order {MAX_ORDER}")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    if order == 0:
        out[x >= 1.0 - _MARGIN] = 1.0
    inside = (x > _MARGIN) & (x < 1.0 - _MARGIN)
    if np.any(inside):
        out[inside] = _step_lambdified(order)(x[inside])
    return out


@dataclass(frozen=True)
class PlateauBump:
    """Even bump: 1 on [-plateau, plateau], 0 outside [-support, support].

    q(v) = s((v + support)/width) * s((support - v)/width), width = support
    - plateau.  Derivatives come from the Leibniz rule on the two step
    factors, so they inherit the symbolic accuracy of smooth_step.
    """

    plateau: float = 0.4   # 8/20
    support: float = 0.45  # 9/20

    def __post_init__(self):
        if not 0 < self.plateau < self.support:
            raise ValueError("need 0 < plateau < support")

    @property
    def width(self) -> float:
        return self.support - self.plateau

    def __call__(self, v, order: int = 0):
        v = np.asarray(v, dtype=float)
        w = self.width
        a = (v + self.support) / w
        b = (self.support - v) / w
        if order == 0:
            return smooth_step(a) * smooth_step(b)
        out = np.zeros_like(v)
        for r in range(order + 1):
            fa = smooth_step(a, r) / w**r
            fb = smooth_step(b, order - r) * (-1.0 / w) ** (order - r)
            out += comb(order, r) * fa * fb
        return out

    def derivative_sup(self, order: int, n: int = 4097) -> float:
        """sup |q^(order)| over the support, by dense sampling."""
        v = np.linspace(-self.support, self.support, n)
        return float(np.max(np.abs(self(v, order))))


@dataclass(frozen=True)
class AdaptedBump:
    """A modulated, rescaled plateau bump

        phi(u) = q((u - center)/scale) * exp(2*pi*i*n*(u - center)/scale)

    adapted to the interval [center - scale*support, center + scale*support].
    Derivatives use Leibniz over the q factor and the exponential.
    """

    base: PlateauBump
    center: float = 0.0
    scale: float = 1.0
    n: int = 0

    def __call__(self, u, order: int = 0):
        u = np.asarray(u, dtype=float)
        v = (u - self.center) / self.scale
        if order == 0:
            vals = self.base(v).astype(complex)
            if self.n:
                vals = vals * np.exp(2j * np.pi * self.n * v)
            return vals
        out = np.zeros(v.shape, dtype=complex)
        freq = 2j * np.pi * self.n
        for r in range(order + 1):
            out += comb(order, r) * self.base(v, r) * freq ** (order - r)
        if self.n:
            out = out * np.exp(2j * np.pi * self.n * v)
        return out / self.scale**order

    def support_interval(self) -> tuple[float, float]:
        return (
            self.center - self.scale * self.base.support,
            self.center + self.scale * self.base.support,
        )

    def adapted_constants(self, max_order: int = 2, n_samples: int = 2049) -> list[float]:
        """Scale-normalized sup bounds sup |scale^r phi^(r)| for r <= max_order.

        For a bump adapted to an interval of length ~ scale these must be
        O(1) uniformly in center and scale (polynomial growth in |n| is
        expected and reported by the caller).
        """
        lo, hi = self.support_interval()
        u = np.linspace(lo, hi, n_samples)
        return [
            float(np.max(np.abs(self(u, r))) * self.scale**r)
            for r in range(max_order + 1)
        ]
