"""Exact fractional Gaussian noise / fractional Brownian motion sampling.

Paths are drawn by circulant embedding of the fGn autocovariance
(Davies & Harte, 1987).  The embedding is exact, so the generated
increments have precisely the Toeplitz covariance ``gamma(|i - j|)``.

Every path is a deterministic function of ``(n, h, seed)``.  Ensembles
obtain per-path seeds from :func:`derive_seed`, which keeps results
independent of how the work is scheduled.
"""

from __future__ import annotations

import csv
import functools
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Negative circulant eigenvalues smaller than this fraction of the largest
# are rounding noise and get clamped to zero.
EIGENVALUE_RTOL = 1e-10


class EmbeddingError(RuntimeError):
    """The circulant embedding is not positive semi-definite."""


def _check_hurst(h: float) -> None:
    if not 0.0 < h < 1.0:
        raise ValueError(f"Hurst exponent must lie in (0, 1), got {h!r}")


def fgn_autocovariance(k, h: float):
    """Autocovariance of unit-variance fractional Gaussian noise at lag ``k``.

    ``gamma(k) = (|k+1|^{2h} - 2|k|^{2h} + |k-1|^{2h}) / 2``.  Accepts a
    scalar or an array of lags and returns the same shape.
    """
    _check_hurst(h)
    k = np.abs(np.asarray(k, dtype=float))
    two_h = 2.0 * h
    out = 0.5 * ((k + 1.0) ** two_h - 2.0 * k**two_h + np.abs(k - 1.0) ** two_h)
    if out.ndim == 0:
        return float(out)
    return out


def embedding_size(n: int) -> int:
    """Circulant size used for an ``n``-point sample: next power of two >= 2(n-1)."""
    if n < 2:
        return 1
    return 1 << int(2 * (n - 1) - 1).bit_length()


@functools.lru_cache(maxsize=64)
def _sqrt_eigenvalues(n: int, h: float) -> np.ndarray:
    m = embedding_size(n)
    half = m // 2
    gamma = fgn_autocovariance(np.arange(half + 1), h)
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    lam = np.fft.fft(row).real
    floor = -EIGENVALUE_RTOL * lam.max()
    if lam.min() < floor:
        raise EmbeddingError(
            f"circulant eigenvalue {lam.min():.3e} below tolerance {floor:.3e} "
            f"(n={n}, h={h})"
        )
    out = np.sqrt(np.clip(lam, 0.0, None) / m)
    out.setflags(write=False)
    return out


def rng_from_seed(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed)))


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed for stream ``index`` of an ensemble keyed by ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def generate_fgn(n: int, h: float, seed: int) -> np.ndarray:
    """Draw ``n`` unit-variance fGn increments with Hurst exponent ``h``.

    Parameters
    ----------
    n : int
        Number of increments, ``n >= 1``.
    h : float
        Hurst exponent in ``(0, 1)``.
    seed : int
        64-bit seed; output is bit-identical for identical arguments.

    Returns
    -------
    numpy.ndarray
        Array of shape ``(n,)``.

    Raises
    ------
    EmbeddingError
        If the circulant embedding has a materially negative eigenvalue.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_hurst(h)
    rng = rng_from_seed(seed)
    if n == 1:
        return rng.standard_normal(1)
    sqrt_lam = _sqrt_eigenvalues(n, float(h))
    m = sqrt_lam.size
    z = rng.standard_normal((2, m))
    # Real and imaginary parts of F diag(sqrt(lam/m)) (z0 + i z1) are each an
    # exact draw from the circulant covariance; only the real part is used.
    w = np.fft.fft(sqrt_lam * (z[0] + 1j * z[1]))
    return w.real[:n].copy()


@dataclass(frozen=True)
class FbmPath:
    """Standard fBm sampled at integer days ``0..T``; ``values[0] == 0``."""

    h: float
    values: np.ndarray

    def __post_init__(self):
        _check_hurst(self.h)
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("an fBm path needs at least two points")
        if self.values[0] != 0.0:
            raise ValueError("fBm path must start at 0")

    @property
    def horizon(self) -> int:
        return self.values.size - 1


def generate_fbm(t_len: int, h: float, seed: int) -> FbmPath:
    """Standard fBm on days ``0..t_len`` built from :func:`generate_fgn`."""
    if t_len < 1:
        raise ValueError(f"t_len must be >= 1, got {t_len}")
    values = np.empty(t_len + 1)
    values[0] = 0.0
    np.cumsum(generate_fgn(t_len, h, seed), out=values[1:])
    values.setflags(write=False)
    return FbmPath(h=float(h), values=values)


def write_path_csv(path: FbmPath, target: str | Path) -> None:
    """Dump a path as CSV with columns ``t,value``."""
    with open(target, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "value"])
        for t, v in enumerate(path.values):
            writer.writerow([t, repr(float(v))])
