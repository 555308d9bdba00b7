"""Geometric fractional Brownian motion price model.

Prices follow ``X(t) = x0 * exp(mu * t + sigma * B_t)`` with ``B`` a
standard fBm and ``t`` in days, so ``ln X(T)`` is Gaussian with mean
``ln x0 + mu T`` and standard deviation ``sigma T^h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fbm import FbmPath


@dataclass(frozen=True)
class GfbmParams:
    x0: float
    mu: float
    sigma: float
    h: float

    def __post_init__(self):
        for name in ("x0", "mu", "sigma", "h"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.x0 <= 0:
            raise ValueError(f"x0 must be positive, got {self.x0}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")
        if not 0.0 < self.h < 1.0:
            raise ValueError(f"h must lie in (0, 1), got {self.h}")

    def scaled(self, c: float) -> GfbmParams:
        return GfbmParams(self.x0 * c, self.mu, self.sigma, self.h)


@dataclass(frozen=True)
class LognormalLaw:
    """Law of ``exp(Z)`` with ``Z ~ N(m, s^2)``."""

    m: float
    s: float

    def __post_init__(self):
        if not (math.isfinite(self.m) and math.isfinite(self.s)):
            raise ValueError("m and s must be finite")
        if self.s < 0:
            raise ValueError(f"s must be non-negative, got {self.s}")

    @property
    def median(self) -> float:
        return math.exp(self.m)


def price_path(params: GfbmParams, fbm: FbmPath) -> np.ndarray:
    """Map a standard fBm path to prices on days ``0..T``."""
    if fbm.h != params.h:
        raise ValueError(f"path Hurst exponent {fbm.h} != model h {params.h}")
    t = np.arange(fbm.values.size, dtype=float)
    out = params.x0 * np.exp(params.mu * t + params.sigma * fbm.values)
    out[0] = params.x0
    return out


def terminal_law(params: GfbmParams, t_len: int) -> LognormalLaw:
    """Exact law of the price after ``t_len`` days."""
    if t_len < 1:
        raise ValueError(f"t_len must be >= 1, got {t_len}")
    return LognormalLaw(
        m=math.log(params.x0) + params.mu * t_len,
        s=params.sigma * t_len**params.h,
    )


def lognormal_stats(law: LognormalLaw) -> tuple[float, float, float]:
    """``(mean, median, mode)`` of a log-normal law."""
    m, s2 = law.m, law.s**2
    return math.exp(m + s2 / 2.0), math.exp(m), math.exp(m - s2)


def std_normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def lognormal_cdf(law: LognormalLaw, x: float) -> float:
    """``P(X <= x)``.  A degenerate law (``s == 0``) is a unit step at ``e^m``."""
    if not x > 0:
        raise ValueError(f"price must be positive, got {x}")
    if law.s == 0.0:
        return 1.0 if x >= law.median else 0.0
    return std_normal_cdf((math.log(x) - law.m) / law.s)
