import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from .metrics import EvaluationError

logger = logging.getLogger(__name__)

_MAX_REDRAWS = 100


@dataclass(frozen=True)
class RegressionFit:
    beta0: float
    beta1: float
    ci_low: float = math.nan
    ci_high: float = math.nan
    n_boot: int = 0
    level: float = 0.95

    @property
    def degenerate_interval(self) -> bool:
        """Fewer than two resamples cannot give a spread."""
        return self.n_boot < 2

    def to_dict(self) -> dict:
        data = asdict(self)
        data["degenerate_interval"] = self.degenerate_interval
        return data


def _as_xy(x, y, min_len: int):
    x = np.ravel(np.asarray(x, dtype=np.float64))
    y = np.ravel(np.asarray(y, dtype=np.float64))
    if x.shape != y.shape:
        raise EvaluationError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < min_len:
        raise EvaluationError(f"need at least {min_len} points, got {x.size}")
    return x, y


def _slopes(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Row-wise least-squares slopes of a stack of samples."""
    dx = xs - xs.mean(axis=-1, keepdims=True)
    dy = ys - ys.mean(axis=-1, keepdims=True)
    return np.sum(dx * dy, axis=-1) / np.sum(dx * dx, axis=-1)


def ols_fit(x, y) -> RegressionFit:
    """Point estimates beta1 = cov(x, y) / var(x), beta0 = mean(y) - beta1 * mean(x)."""
    x, y = _as_xy(x, y, 2)
    if np.ptp(x) == 0:
        raise EvaluationError("x is constant; slope is undefined")
    beta1 = float(_slopes(x, y))
    return RegressionFit(beta0=float(y.mean() - beta1 * x.mean()), beta1=beta1)


def bootstrap_ci(x, y, n_boot: int = 1000, level: float = 0.95,
                 rng: Optional[np.random.Generator] = None) -> Tuple[float, float]:
    """
    Percentile interval for the slope from a pairs bootstrap. Resamples whose
    x values are all equal are drawn again.
    """
    x, y = _as_xy(x, y, 3)
    if np.ptp(x) == 0:
        raise EvaluationError("x is constant; slope is undefined")
    if n_boot < 1 or not 0 < level < 1:
        raise EvaluationError("n_boot must be >= 1 and level in (0, 1)")
    rng = np.random.default_rng() if rng is None else rng

    n = x.size
    idx = rng.integers(0, n, size=(n_boot, n))
    for _ in range(_MAX_REDRAWS):
        flat = np.ptp(x[idx], axis=1) == 0
        if not flat.any():
            break
        idx[flat] = rng.integers(0, n, size=(int(flat.sum()), n))
    else:
        raise EvaluationError("could not draw non-degenerate resamples")

    slopes = _slopes(x[idx], y[idx])
    tail = 100.0 * (1.0 - level) / 2.0
    low, high = np.percentile(slopes, [tail, 100.0 - tail])
    return float(low), float(high)


def fit_with_ci(x, y, n_boot: int = 1000, level: float = 0.95,
                rng: Optional[np.random.Generator] = None) -> RegressionFit:
    point = ols_fit(x, y)
    low, high = bootstrap_ci(x, y, n_boot, level, rng)
    if n_boot < 2:
        logger.warning("bootstrap with %d resample(s) gives a single-value interval", n_boot)
    return RegressionFit(point.beta0, point.beta1, low, high, n_boot, level)
