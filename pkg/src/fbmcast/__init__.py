"""Long-memory price forecasting with geometric fractional Brownian motion."""

from .fbm import FbmPath, derive_seed, fgn_autocovariance, generate_fbm, generate_fgn
from .gfbm import (
    GfbmParams,
    LognormalLaw,
    lognormal_cdf,
    lognormal_stats,
    price_path,
    terminal_law,
)
from .hurst import HurstEstimate, estimate_hurst, sliding_hurst
from .market_data import (
    PriceSeries,
    estimate_drift_vol,
    fill_gaps,
    log_returns,
    parse_price_csv,
    sliding_windows,
)
from .montecarlo import (
    TerminalDistribution,
    empirical_cdf,
    fit_lognormal,
    forecast_report,
    run_ensemble,
)

__version__ = "0.1.0"
