"""Monte Carlo ensembles of geometric fBm and their terminal distributions."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .fbm import FbmPath, derive_seed, generate_fbm
from .gfbm import GfbmParams, LognormalLaw, lognormal_cdf, lognormal_stats, price_path


@dataclass(frozen=True)
class TerminalDistribution:
    samples: np.ndarray
    fit: LognormalLaw
    n: int
    params: GfbmParams
    horizon: int
    master_seed: int
    paths: tuple[FbmPath, ...] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.samples.size != self.n or self.n < 2:
            raise ValueError("sample count mismatch or fewer than 2 samples")

    @property
    def sample_median(self) -> float:
        return float(np.median(self.samples))


def _simulate_chunk(params, t_len, master_seed, indices, keep_paths):
    terminals = np.empty(len(indices))
    paths = [] if keep_paths else None
    for k, i in enumerate(indices):
        path = generate_fbm(t_len, params.h, derive_seed(master_seed, i))
        terminals[k] = price_path(params, path)[t_len]
        if keep_paths:
            paths.append(path)
    return terminals, paths


def run_ensemble(
    params: GfbmParams,
    t_len: int,
    n: int,
    master_seed: int = 0,
    jobs: int = 1,
    store_paths: bool = False,
) -> TerminalDistribution:
    """Simulate ``n`` price paths for ``t_len`` days and collect terminal prices.

    Path ``i`` is seeded with ``derive_seed(master_seed, i)``, so the
    result does not depend on ``jobs``.  Any generation failure aborts the
    whole ensemble.
    """
    if n < 2:
        raise ValueError(f"ensemble size must be >= 2, got {n}")
    if t_len < 1:
        raise ValueError(f"horizon must be >= 1, got {t_len}")
    jobs = max(1, int(jobs))
    chunks = [c for c in np.array_split(np.arange(n), jobs) if c.size]
    if len(chunks) == 1:
        results = [_simulate_chunk(params, t_len, master_seed, chunks[0], store_paths)]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(pool.map(
                lambda c: _simulate_chunk(params, t_len, master_seed, c, store_paths),
                chunks,
            ))
    terminals = np.concatenate([r[0] for r in results])
    paths = tuple(p for r in results for p in r[1]) if store_paths else None
    samples = np.sort(terminals)
    samples.setflags(write=False)
    return TerminalDistribution(
        samples=samples,
        fit=fit_lognormal(samples),
        n=n,
        params=params,
        horizon=t_len,
        master_seed=int(master_seed),
        paths=paths,
    )


def fit_lognormal(samples: Sequence[float]) -> LognormalLaw:
    """Moment fit in log space (sample std with n-1 denominator)."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    if np.any(x <= 0):
        raise ValueError("samples must be strictly positive")
    logs = np.log(x)
    s = float(logs.std(ddof=1))
    if np.all(logs == logs[0]):
        s = 0.0
    return LognormalLaw(m=float(logs.mean()), s=s)


def empirical_cdf(dist: TerminalDistribution, x: float) -> float:
    """Fraction of terminal samples ``<= x``."""
    return int(np.searchsorted(dist.samples, x, side="right")) / dist.n


@dataclass(frozen=True)
class Query:
    x: float
    p_le: float
    p_gt: float
    analytic_p_le: float
    label: str = "threshold"


@dataclass(frozen=True)
class ForecastReport:
    dist: TerminalDistribution
    mean: float
    median: float
    mode: float
    queries: tuple[Query, ...]
    bins: str | int = "fd"

    def to_dict(self) -> dict:
        p = self.dist.params
        return {
            "params": {"x0": p.x0, "mu": p.mu, "sigma": p.sigma, "h": p.h},
            "horizon": self.dist.horizon,
            "n": self.dist.n,
            "master_seed": self.dist.master_seed,
            "fit": {"m": self.dist.fit.m, "s": self.dist.fit.s},
            "stats": {
                "mean": self.mean,
                "median": self.median,
                "mode": self.mode,
                "sample_median": self.dist.sample_median,
            },
            "queries": [
                {"x": q.x, "label": q.label, "p_le": q.p_le, "p_gt": q.p_gt,
                 "analytic_p_le": q.analytic_p_le}
                for q in self.queries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def histogram(self) -> list[tuple[float, float, int, float]]:
        """``(bin_left, bin_right, count, density)`` rows for the terminal PDF."""
        counts, edges = np.histogram(self.dist.samples, bins=self.bins)
        widths = np.diff(edges)
        rows = []
        for c, lo, hi, w in zip(counts, edges[:-1], edges[1:], widths):
            dens = c / (self.dist.n * w) if w > 0 else math.inf
            rows.append((float(lo), float(hi), int(c), float(dens)))
        return rows

    def cdf_rows(self) -> list[tuple[float, float, float]]:
        """``(x, empirical_p, analytic_p)`` at each distinct sample."""
        xs = np.unique(self.dist.samples)
        n = self.dist.n
        hi = np.searchsorted(self.dist.samples, xs, side="right")
        return [
            (float(x), int(k) / n, lognormal_cdf(self.dist.fit, float(x)))
            for x, k in zip(xs, hi)
        ]

    def write(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(self.to_json())
        with open(out / "histogram.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["bin_left", "bin_right", "count", "density"])
            for lo, hi, c, d in self.histogram():
                w.writerow([repr(lo), repr(hi), c, repr(d)])
        with open(out / "cdf.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "empirical_p", "analytic_p"])
            for x, pe, pa in self.cdf_rows():
                w.writerow([repr(x), repr(pe), repr(pa)])


def _query(dist: TerminalDistribution, x: float, label: str) -> Query:
    p_le = empirical_cdf(dist, x)
    return Query(x=float(x), p_le=p_le, p_gt=1.0 - p_le,
                 analytic_p_le=lognormal_cdf(dist.fit, x), label=label)


def forecast_report(
    dist: TerminalDistribution,
    thresholds: Sequence[float] = (),
    bins: str | int = "fd",
) -> ForecastReport:
    """Summarise a terminal distribution.

    Queries are answered at each threshold and at the fitted mean and
    mode.  The fitted median ``exp(m)`` is the point forecast.
    """
    mean, median, mode = lognormal_stats(dist.fit)
    queries = [_query(dist, x, "threshold") for x in thresholds]
    queries.append(_query(dist, mean, "mean"))
    queries.append(_query(dist, mode, "mode"))
    return ForecastReport(dist, mean, median, mode, tuple(queries), bins)
