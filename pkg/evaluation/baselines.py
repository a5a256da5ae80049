"""
Rule baselines. Each produces a directional guess for the domestic return
of the next shared date and is scored with the same hit-ratio rule as the
networks.
"""

from typing import Dict, Sequence

import numpy as np

from features import FeatureMatrix
from features.pipeline import OCTC
from .metrics import EvalReport, EvaluationError, hit_ratio

BASELINES = ("momentum_domestic", "momentum_foreign", "buy_hold")


def baseline_momentum_domestic(domestic_returns) -> EvalReport:
    """Tomorrow moves the way today did: sign(r_t) against r_{t+1}."""
    r = np.ravel(np.asarray(domestic_returns, dtype=np.float64))
    if r.size < 2:
        raise EvaluationError(f"need at least 2 returns, got {r.size}")
    return hit_ratio(np.sign(r[:-1]), r[1:])


def baseline_momentum_foreign(foreign_returns, domestic_next_returns) -> EvalReport:
    """
    The domestic market follows the foreign session: sign(foreign r_t)
    against domestic r_{t+1}. Inputs are already paired day by day.
    """
    f = np.ravel(np.asarray(foreign_returns, dtype=np.float64))
    d = np.ravel(np.asarray(domestic_next_returns, dtype=np.float64))
    if f.size != d.size:
        raise EvaluationError(f"misaligned lengths: {f.size} foreign vs {d.size} domestic returns")
    return hit_ratio(np.sign(f), d)


def baseline_buy_hold(domestic_returns) -> EvalReport:
    r = np.ravel(np.asarray(domestic_returns, dtype=np.float64))
    return hit_ratio(np.ones_like(r), r)


def rule_baselines(matrix: FeatureMatrix, rows: Sequence[int]) -> Dict[str, EvalReport]:
    """All three rules scored on the targets of a contiguous block of feature rows."""
    rows = np.asarray(rows)
    if rows.size == 0:
        raise EvaluationError("empty row block")
    if np.any(np.diff(rows) != 1):
        raise EvaluationError("baseline rows must be contiguous")
    targets = matrix.target[rows]
    domestic = np.concatenate([[matrix.domestic[rows[0], OCTC]], targets])
    scores = (
        baseline_momentum_domestic(domestic),
        baseline_momentum_foreign(matrix.foreign[rows, OCTC], targets),
        baseline_buy_hold(targets),
    )
    return dict(zip(BASELINES, scores))
