"""Command-line front end: ``ingest``, ``hurst``, ``stats`` and ``forecast``."""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from . import fbm, hurst, market_data, montecarlo
from .gfbm import GfbmParams

log = logging.getLogger("fbmcast")


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    input_path: Path | None = None
    output_dir: Path = Path(".")
    horizon_days: int = 180
    n_paths: int = 10_000
    seed: int = 0
    jobs: int = 1
    h_override: float | None = None
    mu_override: float | None = None
    sigma_override: float | None = None
    x0_override: float | None = None
    window: int | None = None
    end_date: date | None = None
    thresholds: list[float] = field(default_factory=list)
    store_paths: bool = False

    def validate(self) -> None:
        if self.n_paths < 2:
            raise CliError(f"ensemble size must be >= 2, got {self.n_paths}")
        if self.horizon_days < 1:
            raise CliError(f"horizon must be >= 1 day, got {self.horizon_days}")
        if not 0 <= self.seed < 2**64:
            raise CliError("seed must be an unsigned 64-bit integer")
        if self.jobs < 1:
            raise CliError("--jobs must be >= 1")
        if self.h_override is not None and not 0 < self.h_override < 1:
            raise CliError(f"--h must lie in (0, 1), got {self.h_override}")
        if self.sigma_override is not None and not self.sigma_override >= 0:
            raise CliError(f"--sigma must be >= 0, got {self.sigma_override}")
        if self.x0_override is not None and not self.x0_override > 0:
            raise CliError(f"--x0 must be > 0, got {self.x0_override}")
        for name in ("h_override", "mu_override", "sigma_override", "x0_override"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                raise CliError(f"--{name.split('_')[0]} must be finite")
        for x in self.thresholds:
            if not x > 0 or not math.isfinite(x):
                raise CliError(f"thresholds must be positive prices, got {x}")

    @property
    def needs_prices(self) -> bool:
        return None in (self.h_override, self.mu_override, self.sigma_override, self.x0_override)


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def _load(config: RunConfig) -> market_data.PriceSeries:
    if config.input_path is None:
        raise CliError("--input is required")
    try:
        series = market_data.read_price_csv(config.input_path)
    except OSError as exc:
        raise CliError(f"cannot read {config.input_path}: {exc.strerror or exc}") from None
    if config.end_date is not None:
        series = series.until(config.end_date)
    return series


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out}: {exc.strerror or exc}") from None
    return out


def cmd_ingest(config: RunConfig) -> Path:
    series = _load(config)
    target = _out_dir(config) / "cleaned.csv"
    market_data.write_price_csv(series, target)
    print(f"points: {len(series)}")
    print(f"interpolated: {series.n_interpolated}")
    print(f"range: {series.dates[0]}..{series.dates[-1]}")
    print(f"written: {target}")
    return target


def cmd_hurst(config: RunConfig) -> hurst.HurstEstimate:
    series = _load(config)
    if config.window is not None and config.window > len(series):
        raise CliError(f"window {config.window} exceeds series length {len(series)}")
    est = hurst.estimate_hurst(series.prices)
    print(str(est))
    if config.window is not None:
        track = hurst.sliding_hurst(series, config.window)
        target = _out_dir(config) / f"hurst_w{config.window}.csv"
        with open(target, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["start_date", "h", "dh"])
            for start, e in track:
                w.writerow([start.isoformat(), repr(e.h), repr(e.dh)])
        print(f"written: {target} ({len(track)} windows)")
    return est


def cmd_stats(config: RunConfig) -> tuple[float, float]:
    series = _load(config)
    mu, sigma = market_data.estimate_drift_vol(market_data.log_returns(series))
    print(f"mu = {_fmt(mu)}  sigma = {_fmt(sigma)}")
    if config.window is not None:
        if config.window > len(series):
            raise CliError(f"window {config.window} exceeds series length {len(series)}")
        rows = market_data.sliding_drift_vol(series, config.window)
        target = _out_dir(config) / f"drift_vol_w{config.window}.csv"
        with open(target, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["start_date", "mu", "sigma"])
            for start, m, s in rows:
                w.writerow([start.isoformat(), repr(m), repr(s)])
        print(f"written: {target} ({len(rows)} windows)")
    return mu, sigma


def resolve_params(config: RunConfig) -> GfbmParams:
    """Model parameters: explicit overrides first, the rest estimated from prices."""
    h, mu, sigma, x0 = (config.h_override, config.mu_override,
                        config.sigma_override, config.x0_override)
    if config.needs_prices:
        series = _load(config)
        if x0 is None:
            x0 = float(series.prices[-1])
        if mu is None or sigma is None:
            est_mu, est_sigma = market_data.estimate_drift_vol(market_data.log_returns(series))
            mu = est_mu if mu is None else mu
            sigma = est_sigma if sigma is None else sigma
        if h is None:
            h = hurst.estimate_hurst(series.prices).h
    try:
        return GfbmParams(x0=x0, mu=mu, sigma=sigma, h=h)
    except ValueError as exc:
        raise CliError(f"invalid model parameters: {exc}") from None


def cmd_forecast(config: RunConfig) -> montecarlo.ForecastReport:
    config.validate()
    params = resolve_params(config)
    out = _out_dir(config)
    log.info("simulating %d paths x %d days with %s", config.n_paths, config.horizon_days, params)
    try:
        dist = montecarlo.run_ensemble(
            params, config.horizon_days, config.n_paths, config.seed,
            jobs=config.jobs, store_paths=config.store_paths,
        )
    except fbm.EmbeddingError as exc:
        raise CliError(f"simulation failed: {exc}") from None
    report = montecarlo.forecast_report(dist, config.thresholds)
    try:
        report.write(out)
        if dist.paths is not None:
            paths_dir = out / "paths"
            paths_dir.mkdir(exist_ok=True)
            width = len(str(dist.n - 1))
            for i, path in enumerate(dist.paths):
                fbm.write_path_csv(path, paths_dir / f"path_{i:0{width}d}.csv")
    except OSError as exc:
        raise CliError(f"cannot write outputs to {out}: {exc.strerror or exc}") from None

    print(f"params: x0={_fmt(params.x0)} mu={_fmt(params.mu)} "
          f"sigma={_fmt(params.sigma)} h={_fmt(params.h)}")
    print(f"median forecast ({config.horizon_days} d): {_fmt(report.median)}")
    print(f"mean: {_fmt(report.mean)}  mode: {_fmt(report.mode)}")
    for q in report.queries:
        print(f"P(X <= {_fmt(q.x)}) = {_fmt(q.p_le)}  P(X > {_fmt(q.x)}) = {_fmt(q.p_gt)}"
              f"  [{q.label}]")
    print(f"written: {out / 'report.json'}")
    return report


COMMANDS = {
    "ingest": cmd_ingest,
    "hurst": cmd_hurst,
    "stats": cmd_stats,
    "forecast": cmd_forecast,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbmcast",
        description="Hurst/drift/volatility estimation and geometric fBm price forecasts.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--input", type=Path, help="price CSV with header 'date,price'")
    shared.add_argument("--output-dir", type=Path, default=Path("."))
    shared.add_argument("--end", type=date.fromisoformat, metavar="YYYY-MM-DD",
                        help="use only prices up to and including this date")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("ingest", parents=[shared], help="validate, gap-fill and export prices")
    p = sub.add_parser("hurst", parents=[shared], help="Hurst exponent of the price series")
    p.add_argument("--window", type=int, help="also write a sliding-window track")
    p = sub.add_parser("stats", parents=[shared], help="daily drift and volatility")
    p.add_argument("--window", type=int, help="also write sliding values (e.g. 180)")

    p = sub.add_parser("forecast", parents=[shared], help="Monte Carlo terminal price forecast")
    p.add_argument("--horizon", type=int, default=180, help="days ahead (default 180)")
    p.add_argument("--paths", type=int, default=10_000, help="ensemble size (default 10000)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker threads; never changes output")
    p.add_argument("--threshold", type=float, action="append", default=[],
                   help="price to query (repeatable)")
    p.add_argument("--h", type=float, dest="h")
    p.add_argument("--mu", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--x0", type=float)
    p.add_argument("--store-paths", action="store_true", help="dump every fBm path as CSV")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(input_path=args.input, output_dir=args.output_dir, end_date=args.end,
                    window=getattr(args, "window", None))
    if args.command == "forecast":
        cfg.horizon_days = args.horizon
        cfg.n_paths = args.paths
        cfg.seed = args.seed
        cfg.jobs = args.jobs
        cfg.thresholds = list(args.threshold)
        cfg.h_override, cfg.mu_override = args.h, args.mu
        cfg.sigma_override, cfg.x0_override = args.sigma, args.x0
        cfg.store_paths = args.store_paths
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    config = config_from_args(args)
    try:
        COMMANDS[args.command](config)
    except (CliError, market_data.PriceDataError, hurst.HurstEstimationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
