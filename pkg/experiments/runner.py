import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from algorithms.fusion import build_model, save_model
from algorithms.training import EpochLog, train
from algorithms.tpe import Trial, optimize
from evaluation import EvalReport, evaluate_returns, rule_baselines
from features import TARGET, FeatureMatrix, build_matrix, fit_scaler
from market_data import AlignedPair, DataSplit, align_calendars, chronological_split, parse_csv
from synthetic import generate_coupled_markets
from .config import ExperimentConfig, Window

logger = logging.getLogger(__name__)

OK = "ok"
FAILED = "failed"


def scaling_label(feature_range: Tuple[float, float]) -> str:
    return f"[{feature_range[0]:g},{feature_range[1]:g}]"


def derive_seed(*entropy: int) -> int:
    return int(np.random.SeedSequence(list(entropy)).generate_state(1)[0])


def mean_sd(values: Sequence[float]) -> Tuple[float, float]:
    """Mean and sample standard deviation; the SD of a single value is 0."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return float("nan"), float("nan")
    sd = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return float(values.mean()), sd


class CellSummary(NamedTuple):
    hit_mean: float
    hit_sd: float
    mse_mean: float
    mse_sd: float
    n: int


@dataclass
class CellResult:
    foreign_id: str
    window_id: str
    scaling: str
    variant: str
    status: str = OK
    hit_ratio: Optional[float] = None
    mse: Optional[float] = None
    n_test: int = 0
    best_config: Optional[Dict[str, Any]] = None
    best_val_mse: Optional[float] = None
    error: Optional[str] = None
    trials: List[Trial] = field(default_factory=list)
    epoch_log: Optional[EpochLog] = None
    checkpoint: Optional[str] = None

    @property
    def study(self) -> str:
        return "_".join((self.foreign_id, self.window_id, self.scaling, self.variant))

    @property
    def file_stem(self) -> str:
        return self.study.replace("[", "").replace("]", "").replace(",", "_")

    def to_dict(self) -> dict:
        return {
            "foreign_id": self.foreign_id,
            "window_id": self.window_id,
            "scaling": self.scaling,
            "variant": self.variant,
            "status": self.status,
            "hit_ratio": self.hit_ratio,
            "mse": self.mse,
            "n_test": self.n_test,
            "best_config": self.best_config,
            "best_val_mse": self.best_val_mse,
            "error": self.error,
        }


@dataclass
class BaselineRow:
    foreign_id: str
    window_id: str
    scope: str  # "full" window or "test" partition
    reports: Dict[str, EvalReport]

    def to_dict(self) -> dict:
        return {
            "foreign_id": self.foreign_id,
            "window_id": self.window_id,
            "scope": self.scope,
            **{name: report.hit_ratio for name, report in self.reports.items()},
        }


@dataclass
class ExperimentGrid:
    foreign_ids: Tuple[str, ...]
    window_ids: Tuple[str, ...]
    scalings: Tuple[str, ...]
    variants: Tuple[str, ...]
    cells: List[CellResult] = field(default_factory=list)
    baselines: List[BaselineRow] = field(default_factory=list)
    matrices: Dict[Tuple[str, str], FeatureMatrix] = field(default_factory=dict)
    seed: int = 0

    @property
    def failed_cells(self) -> List[CellResult]:
        return [c for c in self.cells if c.status != OK]

    def cell(self, foreign_id: str, window_id: str, scaling: str, variant: str) -> CellResult:
        for c in self.cells:
            if (c.foreign_id, c.window_id, c.scaling, c.variant) == (foreign_id, window_id, scaling, variant):
                return c
        raise KeyError((foreign_id, window_id, scaling, variant))

    def summary(self, foreign_id: str) -> Dict[str, Dict[str, CellSummary]]:
        """
        Mean and SD per variant: over the scaling ranges of each window, and
        over every window x scaling cell under the key "overall". Failed cells
        are left out.
        """
        groups = {window_id: [window_id] for window_id in self.window_ids}
        groups["overall"] = list(self.window_ids)
        result: Dict[str, Dict[str, CellSummary]] = {}
        for key, windows in groups.items():
            result[key] = {}
            for variant in self.variants:
                ok = [c for c in self.cells if c.foreign_id == foreign_id and c.window_id in windows
                      and c.variant == variant and c.status == OK]
                hit = mean_sd([c.hit_ratio for c in ok])
                mse = mean_sd([c.mse for c in ok])
                result[key][variant] = CellSummary(hit[0], hit[1], mse[0], mse[1], len(ok))
        return result

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "foreign_ids": list(self.foreign_ids),
            "windows": list(self.window_ids),
            "scalings": list(self.scalings),
            "variants": list(self.variants),
            "cells": [c.to_dict() for c in self.cells],
            "summary": {
                f: {k: {v: s._asdict() for v, s in row.items()} for k, row in self.summary(f).items()}
                for f in self.foreign_ids
            },
            "baselines": [b.to_dict() for b in self.baselines],
        }


@dataclass(frozen=True)
class CellTask:
    """Everything a worker needs for one grid cell; picklable."""

    foreign_id: str
    window_id: str
    feature_range: Tuple[float, float]
    variant: str
    matrix: FeatureMatrix
    split: DataSplit
    config: ExperimentConfig
    seed: int
    checkpoint_dir: Optional[str] = None


def load_markets(cfg: ExperimentConfig) -> Dict[str, AlignedPair]:
    """Aligned domestic/foreign pair per foreign index, in configuration order."""
    if cfg.synthetic is not None:
        return {cfg.synthetic.foreign_id: generate_coupled_markets(cfg.synthetic).pair}
    domestic = parse_csv(cfg.domestic_csv, cfg.domestic_id)
    return {market_id: align_calendars(domestic, parse_csv(path, market_id)) for market_id, path in cfg.foreign}


def make_objective(task: CellTask, data):
    """Validation MSE (scaled units) of a freshly trained model per configuration."""
    counter = itertools.count()

    def objective(params: Dict[str, Any]) -> float:
        seed = derive_seed(task.seed, 1, next(counter))
        model = build_model(task.config.model_spec(task.variant, params), np.random.default_rng(seed))
        _, log = train(model, data, task.split, task.config.train_config(params, seed))
        return log.best_val_loss

    return objective


def run_cell(task: CellTask) -> CellResult:
    """
    Scale, search, retrain and test one (window, scaling, variant) cell.
    Test rows are only touched by the final evaluation. Failures are
    returned in the result instead of raised.
    """
    result = CellResult(task.foreign_id, task.window_id, scaling_label(task.feature_range), task.variant)
    logger.info("cell %s started", result.study)
    try:
        scaler = fit_scaler(task.matrix, task.split, task.feature_range)
        data = scaler.transform_matrix(task.matrix)
        space = task.config.search_space(task.variant)

        tpe_cfg = replace(task.config.tpe, seed=derive_seed(task.seed, 0))
        best, result.trials = optimize(make_objective(task, data), space, tpe_cfg)

        model = build_model(task.config.model_spec(task.variant, best.config), np.random.default_rng(task.seed))
        model, result.epoch_log = train(model, data, task.split, task.config.train_config(best.config, task.seed))

        test = np.asarray(task.split.test)
        predictions = scaler.inverse_transform(model.predict(data.inputs[test]), TARGET)
        report = evaluate_returns(predictions, task.matrix.target[test])

        result.hit_ratio, result.mse, result.n_test = report.hit_ratio, report.mse, report.n_days
        result.best_config, result.best_val_mse = dict(best.config), best.loss
        if task.checkpoint_dir:
            os.makedirs(task.checkpoint_dir, exist_ok=True)
            result.checkpoint = save_model(model, os.path.join(task.checkpoint_dir, f"{result.file_stem}.npz"), task.seed)
        logger.info("cell %s finished: hit=%.3f mse=%.3e", result.study, result.hit_ratio, result.mse)
    except Exception as exc:
        result.status, result.error = FAILED, f"{type(exc).__name__}: {exc}"
        logger.warning("cell %s failed: %s", result.study, result.error)
    return result


def _failed_window(grid: ExperimentGrid, cfg: ExperimentConfig, foreign_id: str, window: Window, error: str):
    for feature_range in cfg.scaling_ranges:
        for variant in cfg.variants:
            grid.cells.append(CellResult(foreign_id, window.window_id, scaling_label(feature_range), variant,
                                         status=FAILED, error=error))


def run_experiment(cfg: ExperimentConfig, store=None, checkpoint_dir: Optional[str] = None) -> ExperimentGrid:
    """
    Run every (foreign index, window, scaling, variant) cell. Per-cell seeds
    come from the global seed and the cell coordinates, and results keep
    coordinate order whether cells run in one process or in a pool.
    `store` (a database.DatabaseManager) receives every cell and trial.
    """
    markets = load_markets(cfg)
    grid = ExperimentGrid(
        foreign_ids=tuple(markets),
        window_ids=tuple(w.window_id for w in cfg.windows),
        scalings=tuple(scaling_label(r) for r in cfg.scaling_ranges),
        variants=tuple(cfg.variants),
        seed=cfg.seed,
    )

    tasks: List[CellTask] = []
    slots: List[int] = []  # position in grid.cells, filled after execution
    for fi, (foreign_id, pair) in enumerate(markets.items()):
        for wi, window in enumerate(cfg.windows):
            try:
                matrix = build_matrix(pair.window(window.start, window.end))
                split = chronological_split(matrix)
            except ValueError as exc:
                logger.warning("window %s/%s unusable: %s", foreign_id, window.window_id, exc)
                _failed_window(grid, cfg, foreign_id, window, f"{type(exc).__name__}: {exc}")
                continue
            grid.matrices[(foreign_id, window.window_id)] = matrix
            grid.baselines.append(BaselineRow(foreign_id, window.window_id, "full", rule_baselines(matrix, range(len(matrix)))))
            grid.baselines.append(BaselineRow(foreign_id, window.window_id, "test", rule_baselines(matrix, split.test)))

            for si, feature_range in enumerate(cfg.scaling_ranges):
                for vi, variant in enumerate(cfg.variants):
                    tasks.append(CellTask(foreign_id, window.window_id, tuple(feature_range), variant, matrix, split,
                                          cfg, derive_seed(cfg.seed, fi, wi, si, vi), checkpoint_dir))
                    grid.cells.append(None)
                    slots.append(len(grid.cells) - 1)

    logger.info("Running %d cell(s) with %d job(s)", len(tasks), cfg.jobs)
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(run_cell, tasks))
    else:
        results = [run_cell(task) for task in tasks]
    for slot, result in zip(slots, results):
        grid.cells[slot] = result

    if store is not None:
        for cell in grid.cells:
            store.record_cell(cell)
            for trial in cell.trials:
                store.record_trial(cell.study, trial)

    logger.info("%d of %d cell(s) failed", len(grid.failed_cells), len(grid.cells))
    return grid
