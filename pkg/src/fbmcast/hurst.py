"""Hurst exponent from the octave scaling of Haar wavelet variances.

For an fBm-like series the detail coefficients at octave ``j`` have
variance proportional to ``2^{j(2H+1)}``, so an ordinary least-squares
line through ``(j, log2 Var_j)`` has slope ``a = 2H + 1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from datetime import date
from typing import Sequence

import numpy as np

from .market_data import PriceSeries, sliding_windows

MIN_LENGTH = 64
# Octaves with fewer coefficients than this are left out of the fit.
MIN_COEFFICIENTS = 8
MIN_OCTAVES = 3
_EULER_GAMMA = 0.5772156649015329


class HurstEstimationError(ValueError):
    pass


@dataclass(frozen=True)
class HurstEstimate:
    h: float
    dh: float
    octaves_used: tuple[int, int]
    slope: float
    n_padded: int

    @property
    def out_of_range(self) -> bool:
        """True when ``h`` falls outside (0, 1); the value is kept unclipped."""
        return not 0.0 < self.h < 1.0

    def __str__(self) -> str:
        return f"H = {self.h:.4g} ± {self.dh:.4g}"


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def pad_pow2_left(series: Sequence[float]) -> np.ndarray:
    """Prepend zeros up to the next power-of-two length."""
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("series must be a non-empty 1-D sequence")
    target = 1 << (x.size - 1).bit_length()
    if target == x.size:
        return x.copy()
    return np.concatenate([np.zeros(target - x.size), x])


def haar_transform(series: Sequence[float]) -> tuple[list[np.ndarray], np.ndarray]:
    """Full orthonormal Haar DWT.

    Returns ``(details, approximation)`` where ``details[j - 1]`` holds the
    ``2^{J-j}`` coefficients of octave ``j`` and ``approximation`` is the
    single remaining smooth coefficient.
    """
    s = np.asarray(series, dtype=float)
    if s.ndim != 1 or not _is_pow2(s.size):
        raise ValueError(f"Haar transform needs a power-of-two length, got {s.size}")
    details = []
    while s.size > 1:
        even, odd = s[0::2], s[1::2]
        details.append((even - odd) / math.sqrt(2.0))
        s = (even + odd) / math.sqrt(2.0)
    return details, s


def haar_detail_coefficients(series: Sequence[float]) -> list[np.ndarray]:
    """Detail coefficients per octave, finest (octave 1) first.  Length must be 2^J, J >= 3."""
    n = np.asarray(series).size
    if not _is_pow2(n) or n < 8:
        raise ValueError(f"length must be a power of two >= 8, got {n}")
    return haar_transform(series)[0]


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Slope and its standard error for ``y ~ a x + b``."""
    xm = x - x.mean()
    sxx = float(xm @ xm)
    slope = float(xm @ (y - y.mean())) / sxx
    intercept = y.mean() - slope * x.mean()
    resid = y - (slope * x + intercept)
    dof = x.size - 2
    se = math.sqrt(float(resid @ resid) / dof / sxx)
    return slope, se


def log2_bias(n_coefficients: int) -> float:
    """Expected ``log2`` of the mean of ``n`` squared unit Gaussians.

    ``(digamma(n/2) - ln(n/2)) / ln 2``; ``n`` must be even.
    """
    if n_coefficients < 2 or n_coefficients % 2:
        raise ValueError("n must be even and >= 2")
    k = n_coefficients // 2
    digamma_k = -_EULER_GAMMA + math.fsum(1.0 / i for i in range(1, k))
    return (digamma_k - math.log(k)) / math.log(2.0)


def estimate_hurst(series: Sequence[float], bias_correction: bool = True) -> HurstEstimate:
    """Estimate the Hurst exponent of ``series`` (a level series, e.g. prices).

    The series is zero-padded on the left to a power of two.  Octaves
    ``1..J-3`` (those with at least 8 coefficients) enter an unweighted
    OLS fit of ``log2`` mean squared detail coefficient against octave.
    ``h = (slope - 1) / 2`` and ``dh`` is half the slope's standard error.

    With ``bias_correction`` the small-sample offset :func:`log2_bias` is
    removed from each octave's log-variance before the fit; without it the
    estimate is biased low by a few hundredths at lengths near 2048.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < MIN_LENGTH:
        raise HurstEstimationError(
            f"need at least {MIN_LENGTH} points, got {x.size}"
        )
    if not np.all(np.isfinite(x)):
        raise HurstEstimationError("series contains non-finite values")
    padded = pad_pow2_left(x)
    details = haar_detail_coefficients(padded)
    usable = [j for j, d in enumerate(details, start=1) if d.size >= MIN_COEFFICIENTS]
    if len(usable) < MIN_OCTAVES:
        raise HurstEstimationError("fewer than 3 octaves with >= 8 coefficients")
    octaves = np.array(usable, dtype=float)
    variances = np.array([np.mean(details[j - 1] ** 2) for j in usable])
    if np.any(variances == 0.0):
        raise HurstEstimationError("zero wavelet variance in the fit range")
    log_var = np.log2(variances)
    if bias_correction:
        log_var -= np.array([log2_bias(details[j - 1].size) for j in usable])
    slope, se = _ols(octaves, log_var)
    est = HurstEstimate(
        h=(slope - 1.0) / 2.0,
        dh=se / 2.0,
        octaves_used=(usable[0], usable[-1]),
        slope=slope,
        n_padded=padded.size,
    )
    if est.out_of_range:
        warnings.warn(f"Hurst estimate {est.h:.4g} outside (0, 1)", stacklevel=2)
    return est


def sliding_hurst(series: PriceSeries, w: int) -> list[tuple[date, HurstEstimate]]:
    """Hurst estimates over every step-1 window of ``w`` prices, keyed by start date."""
    if w < MIN_LENGTH or not _is_pow2(w):
        raise ValueError(f"window must be a power of two >= {MIN_LENGTH}, got {w}")
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for i, chunk in sliding_windows(series.prices, w):
            out.append((series.dates[i], estimate_hurst(chunk)))
    return out
