"""Daily price ingestion, gap filling and return statistics.

Input files are plain CSV with the fixed header ``date,price`` and ISO
dates.  Model time is an integer day index counted from the first row.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import IO, Sequence

import numpy as np

HEADER = ["date", "price"]


class PriceDataError(ValueError):
    """Malformed or invalid price data; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        parts = [str(source)] if source is not None else []
        if line is not None:
            parts.append(f"line {line}")
        super().__init__(": ".join(parts + [message]))


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PriceSeries:
    dates: tuple[date, ...]
    prices: np.ndarray
    interpolated_mask: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        prices = np.array(self.prices, dtype=float)
        if self.interpolated_mask is None:
            mask = np.zeros(prices.size, dtype=bool)
        else:
            mask = np.array(self.interpolated_mask, dtype=bool)
        if len(self.dates) != prices.size or mask.size != prices.size:
            raise PriceDataError("dates, prices and mask must have equal length")
        if prices.size < 2:
            raise PriceDataError(f"series shorter than 2 points ({prices.size})")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
            raise PriceDataError("prices must be finite and strictly positive")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise PriceDataError("dates must be strictly increasing")
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "prices", _frozen(prices))
        object.__setattr__(self, "interpolated_mask", _frozen(mask))

    def __len__(self) -> int:
        return self.prices.size

    @property
    def is_contiguous(self) -> bool:
        return (self.dates[-1] - self.dates[0]).days == len(self) - 1

    def gaps(self) -> list[tuple[date, date, int]]:
        """``(last date before, first date after, missing days)`` for each gap."""
        out = []
        for a, b in zip(self.dates, self.dates[1:]):
            missing = (b - a).days - 1
            if missing:
                out.append((a, b, missing))
        return out

    @property
    def n_interpolated(self) -> int:
        return int(self.interpolated_mask.sum())

    def until(self, last: date) -> PriceSeries:
        """Prefix of the series with dates ``<= last``."""
        k = sum(1 for d in self.dates if d <= last)
        return PriceSeries(self.dates[:k], self.prices[:k], self.interpolated_mask[:k])


def parse_price_csv(source: IO[bytes] | IO[str] | bytes | str, name: str | None = None) -> PriceSeries:
    """Parse a ``date,price`` CSV into a (not yet gap-filled) :class:`PriceSeries`.

    ``source`` may be a binary or text stream, or raw bytes/str content.
    Rows are sorted by date.  Duplicate dates, non-positive prices and
    malformed rows raise :class:`PriceDataError` carrying the line number.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise PriceDataError(f"not UTF-8: {exc}", source=name) from None
    text = source.lstrip("\ufeff")
    rows = list(csv.reader(io.StringIO(text, newline="")))
    if not rows or all(not r for r in rows):
        raise PriceDataError("empty file", source=name)
    if [c.strip() for c in rows[0]] != HEADER:
        raise PriceDataError(f"expected header 'date,price', got {','.join(rows[0])!r}", 1, name)

    seen: dict[date, int] = {}
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise PriceDataError(f"expected 2 fields, got {len(row)}", lineno, name)
        try:
            d = date.fromisoformat(row[0].strip())
        except ValueError:
            raise PriceDataError(f"bad date {row[0]!r}", lineno, name) from None
        try:
            p = float(row[1].strip())
        except ValueError:
            raise PriceDataError(f"bad price {row[1]!r}", lineno, name) from None
        if not math.isfinite(p) or p <= 0:
            raise PriceDataError(f"non-positive price {row[1].strip()}", lineno, name)
        if d in seen:
            raise PriceDataError(f"duplicate date {d} (first seen on line {seen[d]})", lineno, name)
        seen[d] = lineno
        records.append((d, p))

    if len(records) < 2:
        raise PriceDataError(f"series shorter than 2 points ({len(records)})", source=name)
    records.sort()
    return PriceSeries(tuple(d for d, _ in records), np.array([p for _, p in records]))


def read_price_csv(path: str | Path) -> PriceSeries:
    """Parse and gap-fill a price CSV on disk."""
    with open(path, "rb") as fh:
        return fill_gaps(parse_price_csv(fh, name=str(path)))


def write_price_csv(series: PriceSeries, target: str | Path | IO[str]) -> None:
    """Write ``date,price,interpolated`` rows (interpolated is 0/1)."""
    if hasattr(target, "write"):
        _write_rows(series, target)
        return
    with open(target, "w", newline="") as fh:
        _write_rows(series, fh)


def _write_rows(series: PriceSeries, fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(HEADER + ["interpolated"])
    for d, p, flag in zip(series.dates, series.prices, series.interpolated_mask):
        writer.writerow([d.isoformat(), repr(float(p)), int(flag)])


def fill_gaps(series: PriceSeries) -> PriceSeries:
    """Linearly interpolate prices on missing calendar days.

    Existing points (and their interpolation flags) pass through untouched,
    so the operation is idempotent.
    """
    if series.is_contiguous:
        return series
    start = series.dates[0]
    offsets = np.array([(d - start).days for d in series.dates], dtype=float)
    n_days = int(offsets[-1]) + 1
    grid = np.arange(n_days, dtype=float)
    prices = np.interp(grid, offsets, series.prices)
    mask = np.ones(n_days, dtype=bool)
    idx = offsets.astype(int)
    prices[idx] = series.prices
    mask[idx] = series.interpolated_mask
    dates = tuple(start + timedelta(days=i) for i in range(n_days))
    return PriceSeries(dates, prices, mask)


def log_returns(series: PriceSeries | Sequence[float]) -> np.ndarray:
    """Daily log returns, ``r[t] = ln p[t+1] - ln p[t]``."""
    prices = series.prices if isinstance(series, PriceSeries) else np.asarray(series, dtype=float)
    return np.diff(np.log(prices))


def estimate_drift_vol(returns: Sequence[float]) -> tuple[float, float]:
    """Per-day drift and volatility: mean and sample (n-1) std of log returns."""
    r = np.asarray(returns, dtype=float)
    if r.size < 2:
        raise ValueError(f"need at least 2 returns, got {r.size}")
    return float(r.mean()), float(r.std(ddof=1))


def sliding_windows(series: Sequence, w: int, step: int = 1) -> list[tuple[int, Sequence]]:
    """Windows ``series[i:i+w]`` for ``i = 0, step, 2*step, ...`` that fit entirely."""
    n = len(series)
    if w < 1 or step < 1:
        raise ValueError("window length and step must be >= 1")
    if w > n:
        raise ValueError(f"window {w} exceeds series length {n}")
    return [(i, series[i:i + w]) for i in range(0, n - w + 1, step)]


def sliding_drift_vol(series: PriceSeries, w: int = 180, step: int = 1) -> list[tuple[date, float, float]]:
    """Drift and volatility of the returns inside each ``w``-day price window.

    A window of ``w`` prices holds ``w - 1`` returns; rows are keyed by the
    window's start date.
    """
    if w < 3:
        raise ValueError("window must span at least 3 prices")
    logp = np.log(series.prices)
    return [
        (series.dates[i], *estimate_drift_vol(np.diff(chunk)))
        for i, chunk in sliding_windows(logp, w, step)
    ]
