import os
import csv
import json
import logging
import math
from typing import Dict, List, Sequence

from features import export_matrix

logger = logging.getLogger(__name__)

MSE_SCALE = 1e5


def format_cell(hit_ratio: float, mse: float) -> str:
    """Hit ratio with MSE in units of 1e-5, e.g. 0.609 (4.781)."""
    return f"{hit_ratio:.3f} ({mse * MSE_SCALE:.3f})"


def format_summary(summary) -> str:
    if summary.n == 0:
        return "n/a"
    return (f"{summary.hit_mean:.3f}±{summary.hit_sd:.3f} "
            f"({summary.mse_mean * MSE_SCALE:.3f}±{summary.mse_sd * MSE_SCALE:.3f})")


def _finite_or_none(value):
    """JSON has no NaN; missing statistics are written as null."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite_or_none(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite_or_none(v) for v in value]
    return value


def _align(header: Sequence[str], rows: List[Sequence[str]]) -> List[str]:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    return ["  ".join(str(cell).ljust(w) for cell, w in zip(row, widths)).rstrip() for row in [header] + rows]


class ReportGenerator:
    """Writes report tables and plot-ready CSV/JSON files. File names never carry timestamps."""

    def __init__(self, output_dir: str = "results"):
        self.output_dir = output_dir
        os.makedirs(output_dir, exist_ok=True)

    def _path(self, *parts: str) -> str:
        path = os.path.join(self.output_dir, *parts)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        return path

    def save_json(self, data: dict, filename: str) -> str:
        filepath = self._path(filename)
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(_finite_or_none(data), f, indent=2)
            f.write("\n")
        logger.info("JSON saved: %s", filepath)
        return filepath

    def save_csv(self, header: Sequence[str], rows: Sequence[Sequence], filename: str) -> str:
        filepath = self._path(filename)
        with open(filepath, 'w', newline='', encoding='utf-8') as csvfile:
            writer = csv.writer(csvfile, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        logger.debug("CSV saved: %s", filepath)
        return filepath

    def render_table(self, grid) -> str:
        """Aligned text: one block per foreign index, per-window and overall Mean±SD rows, then the rule baselines."""
        lines: List[str] = []
        for foreign_id in grid.foreign_ids:
            summary = grid.summary(foreign_id)
            lines += ["=" * 70, f"Hit ratio (MSE x 1e-5): {foreign_id}", "=" * 70]
            rows = []
            for window_id in grid.window_ids:
                for scaling in grid.scalings:
                    row = [window_id, scaling]
                    for variant in grid.variants:
                        cell = grid.cell(foreign_id, window_id, scaling, variant)
                        row.append(format_cell(cell.hit_ratio, cell.mse) if cell.status == "ok" else "failed")
                    rows.append(row)
                rows.append([window_id, "Mean±SD"] + [format_summary(summary[window_id][v]) for v in grid.variants])
            rows.append(["overall", "Mean±SD"] + [format_summary(summary["overall"][v]) for v in grid.variants])
            lines += _align(["window", "scaling"] + list(grid.variants), rows)

            baselines = [b for b in grid.baselines if b.foreign_id == foreign_id]
            if baselines:
                names = list(baselines[0].reports)
                lines += ["", "Rule baselines (hit ratio)"]
                lines += _align(
                    ["window", "scope"] + names,
                    [[b.window_id, b.scope] + [f"{b.reports[n].hit_ratio:.3f}" for n in names] for b in baselines],
                )
            lines.append("")

        failed = grid.failed_cells
        if failed:
            lines.append(f"{len(failed)} failed cell(s):")
            lines += [f"  {c.study}: {c.error}" for c in failed]
        return "\n".join(lines) + "\n"

    def save_report_text(self, grid, filename: str = "report.txt") -> str:
        filepath = self._path(filename)
        with open(filepath, 'w', encoding='utf-8') as f:
            f.write(self.render_table(grid))
        logger.info("Report table saved: %s", filepath)
        return filepath

    def save_cells_csv(self, grid, filename: str = "cells.csv") -> str:
        columns = ['foreign_id', 'window_id', 'scaling', 'variant', 'status', 'hit_ratio', 'mse', 'n_test']
        rows = [[c.to_dict()[k] for k in columns] for c in grid.cells]
        return self.save_csv(columns, rows, filename)

    def save_trial_history(self, stem: str, trials, dimensions: Sequence[str]) -> str:
        """trial_id, one column per search dimension, val_mse, status."""
        rows = [
            [t.trial_id] + [t.config.get(d) for d in dimensions] + [t.loss if t.completed else "", t.status]
            for t in trials
        ]
        return self.save_csv(['trial_id'] + list(dimensions) + ['val_mse', 'status'], rows, os.path.join("trials", f"{stem}.csv"))

    def save_epoch_log(self, stem: str, log) -> List[str]:
        """epoch, train_mse, val_mse; late fusion adds one file per branch."""
        paths = [self.save_csv(['epoch', 'train_mse', 'val_mse'], log.rows(), os.path.join("epochs", f"{stem}.csv"))]
        for branch, branch_log in log.branch_logs.items():
            paths += self.save_epoch_log(f"{stem}_{branch}", branch_log)
        return paths

    def save_matrix(self, matrix, stem: str) -> str:
        filepath = export_matrix(matrix, self._path("matrices", f"{stem}.csv"))
        logger.debug("Feature matrix saved: %s", filepath)
        return filepath

    def save_scatter(self, stem: str, x, y, fit, meta: dict) -> List[str]:
        """Pairs CSV plus a JSON sidecar carrying the fitted line and interval."""
        csv_path = self.save_csv(['feature', 'target'], [[repr(float(a)), repr(float(b))] for a, b in zip(x, y)],
                                 os.path.join("scatter", f"{stem}.csv"))
        json_path = self.save_json({**meta, **fit.to_dict()}, os.path.join("scatter", f"{stem}.json"))
        return [csv_path, json_path]

    def generate_run_report(self, grid, search_dimensions: Dict[str, Sequence[str]]) -> Dict[str, List[str]]:
        """
        Every output of a grid run: report.json, report.txt, cells.csv, plus
        trial histories, epoch logs and feature matrices.
        `search_dimensions` maps a variant to its search-space dimension names.
        """
        report_files = emit_report(grid, self)
        report_files['cells'] = [self.save_cells_csv(grid)]
        report_files['trials'] = []
        report_files['epochs'] = []
        for cell in grid.cells:
            if cell.trials:
                report_files['trials'].append(self.save_trial_history(cell.file_stem, cell.trials, search_dimensions[cell.variant]))
            if cell.epoch_log is not None:
                report_files['epochs'] += self.save_epoch_log(cell.file_stem, cell.epoch_log)
        report_files['matrices'] = [
            self.save_matrix(matrix, f"{foreign_id}_{window_id}") for (foreign_id, window_id), matrix in grid.matrices.items()
        ]
        return report_files


def emit_report(grid, reporter: ReportGenerator) -> Dict[str, List[str]]:
    """Machine-readable JSON and the aligned text table for one grid."""
    return {
        'json': [reporter.save_json(grid.to_dict(), "report.json")],
        'text': [reporter.save_report_text(grid)],
    }
