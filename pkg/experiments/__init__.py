"""Configuration-driven experiment grid, single-cell tuning and scatter exports."""

from .config import DEFAULT_WINDOWS, VARIANTS, ConfigError, ExperimentConfig, ScatterConfig, Window, load_config
from .runner import (
    BaselineRow,
    CellResult,
    CellSummary,
    CellTask,
    ExperimentGrid,
    derive_seed,
    load_markets,
    mean_sd,
    run_cell,
    run_experiment,
    scaling_label,
)
from .scatter import export_scatter_data

__all__ = [
    'DEFAULT_WINDOWS',
    'VARIANTS',
    'ConfigError',
    'ExperimentConfig',
    'ScatterConfig',
    'Window',
    'load_config',
    'BaselineRow',
    'CellResult',
    'CellSummary',
    'CellTask',
    'ExperimentGrid',
    'derive_seed',
    'load_markets',
    'mean_sd',
    'run_cell',
    'run_experiment',
    'scaling_label',
    'export_scatter_data',
]
