import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

from .space import Config, SearchError, SearchSpace

logger = logging.getLogger(__name__)

COMPLETED = "completed"
FAILED = "failed"


@dataclass(frozen=True)
class Trial:
    trial_id: int
    config: Config
    loss: float
    status: str = COMPLETED
    error: Optional[str] = None

    def __post_init__(self):
        if self.status not in (COMPLETED, FAILED):
            raise SearchError(f"unknown trial status {self.status!r}")
        if self.status == COMPLETED and not math.isfinite(self.loss):
            raise SearchError(f"completed trial {self.trial_id} has non-finite loss {self.loss}")

    @property
    def completed(self) -> bool:
        return self.status == COMPLETED


@dataclass(frozen=True)
class TpeConfig:
    gamma: float = 0.25
    n_startup: int = 10
    n_candidates: int = 24
    max_trials: int = 50
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise SearchError(f"gamma must be in (0, 1), got {self.gamma}")
        if self.n_startup < 1 or self.n_candidates < 1 or self.max_trials < 1:
            raise SearchError("n_startup, n_candidates and max_trials must be >= 1")


def split_good_bad(trials: Sequence[Trial], gamma: float) -> Tuple[List[Trial], List[Trial]]:
    """The ceil(gamma * n) lowest-loss completed trials, and the rest. Equal losses keep history order."""
    completed = [t for t in trials if t.completed]
    if len(completed) < 2:
        raise SearchError(f"need at least 2 completed trials, got {len(completed)}")
    n_good = math.ceil(Fraction(str(gamma)) * len(completed))
    ranked = sorted(completed, key=lambda t: t.loss)
    return ranked[:n_good], ranked[n_good:]


def parzen_categorical_weights(observations: Sequence[Any], choices: Sequence[Any]) -> np.ndarray:
    """Add-one smoothed frequencies: (count(c) + 1) / (n + k)."""
    k = len(choices)
    if k == 0:
        raise SearchError("empty choice domain")
    counts = np.zeros(k)
    for value in observations:
        try:
            counts[list(choices).index(value)] += 1
        except ValueError:
            raise SearchError(f"observation {value!r} is outside the domain {tuple(choices)}") from None
    return (counts + 1.0) / (len(observations) + k)


def suggest(history: Sequence[Trial], space: SearchSpace, cfg: TpeConfig, rng: np.random.Generator) -> Config:
    """
    Uniform sampling until `n_startup` trials completed; afterwards draw
    `n_candidates` configurations from the good-set density l(x) and keep the
    one with the largest l(x)/g(x). Dimensions are modelled independently.
    """
    completed = [t for t in history if t.completed]
    if len(completed) < max(cfg.n_startup, 2):
        return space.sample_uniform(rng)

    good, bad = split_good_bad(completed, cfg.gamma)
    config: Config = {}
    score = np.zeros(cfg.n_candidates)
    picks = {}
    for dim in space.dimensions:
        if dim.is_singleton:
            continue
        below = parzen_categorical_weights([t.config[dim.name] for t in good], dim.choices)
        above = parzen_categorical_weights([t.config[dim.name] for t in bad], dim.choices)
        idx = rng.choice(len(dim.choices), size=cfg.n_candidates, p=below)
        score += np.log(below[idx]) - np.log(above[idx])
        picks[dim.name] = idx

    winner = int(np.argmax(score))
    for dim in space.dimensions:
        config[dim.name] = dim.choices[0] if dim.is_singleton else dim.choices[int(picks[dim.name][winner])]
    return config


def optimize(
    objective: Callable[[Config], float],
    space: SearchSpace,
    cfg: TpeConfig,
    rng: Optional[np.random.Generator] = None,
    store=None,
    study: str = "default",
) -> Tuple[Trial, List[Trial]]:
    """
    Run `max_trials` suggest -> evaluate -> record cycles. An objective that
    raises or returns a non-finite loss yields a failed trial, which stays in
    the history but is ignored by the densities.

    `store` is any object with a ``record_trial(study, trial)`` method
    (e.g. database.DatabaseManager).
    """
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    history: List[Trial] = []
    for trial_id in range(cfg.max_trials):
        config = suggest(history, space, cfg, rng)
        try:
            loss = float(objective(config))
            trial = Trial(trial_id, config, loss) if math.isfinite(loss) else Trial(trial_id, config, loss, FAILED, "non-finite loss")
        except Exception as exc:
            logger.warning("trial %d failed: %s", trial_id, exc)
            trial = Trial(trial_id, config, math.nan, FAILED, str(exc))
        history.append(trial)
        if store is not None:
            store.record_trial(study, trial)
        logger.debug("trial %d %s loss=%.6g %s", trial_id, trial.status, trial.loss, config)

    completed = [t for t in history if t.completed]
    if not completed:
        raise SearchError(f"all {len(history)} trials failed")
    best = min(completed, key=lambda t: t.loss)
    logger.info("best trial %d of %d: loss=%.6g %s", best.trial_id, len(history), best.loss, best.config)
    return best, history


def random_search(objective: Callable[[Config], float], space: SearchSpace, cfg: TpeConfig,
                  rng: Optional[np.random.Generator] = None) -> Tuple[Trial, List[Trial]]:
    """Uniform sampling with the same budget, for comparison against TPE."""
    return optimize(objective, space, replace(cfg, n_startup=cfg.max_trials + 1), rng)
