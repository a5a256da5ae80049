from dataclasses import dataclass
from typing import Optional

import numpy as np


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class EvalReport:
    """Directional accuracy over `n_days` scored days, with the per-day flags P_t and optionally the MSE."""

    hit_ratio: float
    n_days: int
    hits: np.ndarray
    mse: Optional[float] = None

    def to_dict(self) -> dict:
        return {"hit_ratio": self.hit_ratio, "mse": self.mse, "n_days": self.n_days}


def _paired(predictions, actuals):
    predictions = np.ravel(np.asarray(predictions, dtype=np.float64))
    actuals = np.ravel(np.asarray(actuals, dtype=np.float64))
    if predictions.shape != actuals.shape:
        raise EvaluationError(f"length mismatch: {predictions.size} predictions vs {actuals.size} actuals")
    if predictions.size == 0:
        raise EvaluationError("nothing to score")
    return predictions, actuals


def hit_ratio(predictions, actuals) -> EvalReport:
    """P_t = 1 iff predicted and realised returns have a strictly positive product."""
    predictions, actuals = _paired(predictions, actuals)
    hits = (predictions * actuals > 0).astype(np.int8)
    return EvalReport(hit_ratio=float(hits.mean()), n_days=int(hits.size), hits=hits)


def mse_report(predictions, actuals) -> float:
    predictions, actuals = _paired(predictions, actuals)
    return float(np.mean((predictions - actuals) ** 2))


def evaluate_returns(predictions, actuals) -> EvalReport:
    """Hit ratio and MSE together; both inputs must already be in return units."""
    report = hit_ratio(predictions, actuals)
    return EvalReport(report.hit_ratio, report.n_days, report.hits, mse_report(predictions, actuals))
