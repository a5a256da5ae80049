"""Metrics, rule baselines and the scatter regression."""

from .metrics import EvalReport, EvaluationError, evaluate_returns, hit_ratio, mse_report
from .baselines import (
    BASELINES,
    baseline_buy_hold,
    baseline_momentum_domestic,
    baseline_momentum_foreign,
    rule_baselines,
)
from .regression import RegressionFit, bootstrap_ci, fit_with_ci, ols_fit

__all__ = [
    'EvalReport',
    'EvaluationError',
    'evaluate_returns',
    'hit_ratio',
    'mse_report',
    'BASELINES',
    'baseline_buy_hold',
    'baseline_momentum_domestic',
    'baseline_momentum_foreign',
    'rule_baselines',
    'RegressionFit',
    'bootstrap_ci',
    'fit_with_ci',
    'ols_fit',
]
