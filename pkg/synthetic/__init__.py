"""Coupled synthetic markets with a known best achievable hit ratio."""

from .spillover import (
    SynthConfig,
    SyntheticMarkets,
    analytic_oracle_hit_ratio,
    export_synthetic,
    generate_coupled_markets,
    noise_for_hit_ratio,
    oracle_hit_ratio,
)

__all__ = [
    'SynthConfig',
    'SyntheticMarkets',
    'analytic_oracle_hit_ratio',
    'export_synthetic',
    'generate_coupled_markets',
    'noise_for_hit_ratio',
    'oracle_hit_ratio',
]
