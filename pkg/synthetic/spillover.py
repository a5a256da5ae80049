import logging
import math
import os
from dataclasses import asdict, dataclass
from datetime import date
from typing import Dict, NamedTuple, Optional

import numpy as np

from market_data import AlignedPair, MarketSeries, OhlcBar, business_days, write_csv

logger = logging.getLogger(__name__)

BASE_PRICE = 100.0
ORACLE_DRAWS = 1_000_000


@dataclass(frozen=True)
class SynthConfig:
    """
    Two linearly coupled markets. The foreign close-to-close return u_t drives
    the next domestic return: r_{t+1} = coupling * u_t + eps_{t+1}.
    `domestic_sd` is the spread of the domestic opening gap; `shape_sd` sets
    the foreign gap and the high/low excursions of both markets.
    """

    n_days: int = 3000
    coupling: float = 1.0
    noise_sd: float = 0.008
    domestic_sd: float = 0.01
    foreign_sd: float = 0.01
    shape_sd: float = 0.002
    seed: int = 0
    start: date = date(2006, 1, 2)
    domestic_id: str = "KO"
    foreign_id: str = "US"

    def __post_init__(self):
        if self.n_days < 10:
            raise ValueError(f"n_days must be >= 10, got {self.n_days}")
        for name in ("noise_sd", "domestic_sd", "foreign_sd", "shape_sd"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0")

    def to_dict(self) -> dict:
        data = asdict(self)
        data["start"] = self.start.isoformat()
        return data


class SyntheticMarkets(NamedTuple):
    pair: AlignedPair
    next_returns: np.ndarray  # next_returns[t] = domestic r_{t+1}, paired with foreign u_t


def _bars(dates, closes, prev_closes, gaps, up, down, volume=0.0):
    opens = prev_closes * (1.0 + gaps)
    highs = np.maximum(opens, closes) * (1.0 + up)
    lows = np.minimum(opens, closes) * (1.0 - down)
    return tuple(
        OhlcBar(d, float(o), float(h), float(l), float(c), volume)
        for d, o, h, l, c in zip(dates, opens, highs, lows, closes)
    )


def generate_coupled_markets(cfg: SynthConfig) -> SyntheticMarkets:
    """Seeded bars whose close-to-close returns are exactly the simulated ones."""
    n = cfg.n_days
    rng = np.random.default_rng(cfg.seed)
    u = rng.normal(0.0, cfg.foreign_sd, n)
    eps = rng.normal(0.0, cfg.noise_sd, n)
    domestic_gap = rng.normal(0.0, cfg.domestic_sd, n)
    foreign_gap = rng.normal(0.0, cfg.shape_sd, n)
    excursions = np.abs(rng.normal(0.0, cfg.shape_sd, (4, n)))

    r = eps.copy()
    r[1:] += cfg.coupling * u[:-1]

    dates = business_days(cfg.start, n)
    series = {}
    for market_id, returns, gaps, up, down in (
        (cfg.domestic_id, r, domestic_gap, excursions[0], excursions[1]),
        (cfg.foreign_id, u, foreign_gap, excursions[2], excursions[3]),
    ):
        closes = BASE_PRICE * np.cumprod(1.0 + returns)
        prev = np.concatenate([[BASE_PRICE], closes[:-1]])
        series[market_id] = MarketSeries(market_id, _bars(dates, closes, prev, gaps, up, down))

    pair = AlignedPair(series[cfg.domestic_id], series[cfg.foreign_id], tuple(dates))
    logger.info("Generated %d synthetic days (coupling=%g, noise_sd=%g)", n, cfg.coupling, cfg.noise_sd)
    return SyntheticMarkets(pair, r[1:].copy())


def analytic_oracle_hit_ratio(coupling: float, foreign_sd: float, noise_sd: float) -> float:
    """P(sign(a*u) == sign(a*u + eps)) for centred Gaussians: 1/2 + arctan(|a| sd_u / sd_eps) / pi."""
    signal = abs(coupling) * foreign_sd
    if signal == 0:
        return 0.5
    if noise_sd == 0:
        return 1.0
    return 0.5 + math.atan(signal / noise_sd) / math.pi


def noise_for_hit_ratio(target: float, coupling: float = 1.0, foreign_sd: float = 0.01) -> float:
    """Noise level at which the best achievable hit ratio equals `target` (0.5 < target < 1)."""
    if not 0.5 < target < 1.0:
        raise ValueError("target hit ratio must lie in (0.5, 1)")
    return abs(coupling) * foreign_sd / math.tan(math.pi * (target - 0.5))


def oracle_hit_ratio(cfg: SynthConfig, draws: int = ORACLE_DRAWS, rng: Optional[np.random.Generator] = None) -> float:
    """
    Directional accuracy of the Bayes predictor a*u_t under `cfg`, estimated
    from `draws` Monte-Carlo samples.
    """
    if cfg.coupling == 0 or cfg.foreign_sd == 0:
        return 0.5
    if cfg.noise_sd == 0:
        return 1.0
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    signal = cfg.coupling * rng.normal(0.0, cfg.foreign_sd, draws)
    realised = signal + rng.normal(0.0, cfg.noise_sd, draws)
    return float(np.mean(signal * realised > 0))


def export_synthetic(cfg: SynthConfig, out_dir: str) -> Dict[str, str]:
    """Write both markets in the CSV format parse_csv reads; returns {market_id: path}."""
    os.makedirs(out_dir, exist_ok=True)
    markets = generate_coupled_markets(cfg)
    paths = {}
    for series in (markets.pair.domestic, markets.pair.foreign):
        paths[series.market_id] = write_csv(series, os.path.join(out_dir, f"{series.market_id}.csv"))
    return paths
