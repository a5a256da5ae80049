import logging
from typing import List, Optional

import numpy as np

from evaluation import fit_with_ci
from features import build_matrix
from features.pipeline import FEATURE_NAMES
from reporting import ReportGenerator
from .config import ExperimentConfig
from .runner import derive_seed, load_markets

logger = logging.getLogger(__name__)

DOTC = FEATURE_NAMES.index("dotc")


def export_scatter_data(cfg: ExperimentConfig, reporter: Optional[ReportGenerator] = None) -> List[str]:
    """
    For each foreign index, pair every one of the ten features of the first
    window with the next-day target and write a CSV of the pairs plus a JSON
    sidecar with the OLS line and its bootstrap interval. Constant features
    are skipped.
    """
    reporter = reporter or ReportGenerator(cfg.out_dir)
    window = cfg.windows[0]
    written: List[str] = []
    for fi, (foreign_id, pair) in enumerate(load_markets(cfg).items()):
        matrix = build_matrix(pair.window(window.start, window.end))
        if cfg.scatter.target == "octc":
            inputs, target = matrix.inputs, matrix.target
        else:
            # next-day open-to-close gap; the last row has no successor in the matrix
            inputs, target = matrix.inputs[:-1], matrix.domestic[1:, DOTC]

        for ci, column in enumerate(matrix.column_names):
            x = inputs[:, ci]
            if np.ptp(x) == 0:
                logger.warning("%s: feature %s is constant, skipped", foreign_id, column)
                continue
            rng = np.random.default_rng(derive_seed(cfg.seed, fi, ci))
            fit = fit_with_ci(x, target, cfg.scatter.n_boot, cfg.scatter.level, rng)
            meta = {
                "foreign_id": foreign_id,
                "window_id": window.window_id,
                "feature": column,
                "target": f"{matrix.domestic_id.lower()}_{cfg.scatter.target}_next",
                "n": int(x.size),
            }
            written.extend(reporter.save_scatter(f"scatter_{foreign_id}_{column}", x, target, fit, meta))
    logger.info("Wrote %d scatter file(s) to %s", len(written), reporter.output_dir)
    return written
