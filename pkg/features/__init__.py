"""Feature construction and leak-free min-max scaling."""

from .pipeline import (
    FEATURE_NAMES,
    N_FEATURES,
    FeatureError,
    FeatureMatrix,
    FeatureVector,
    build_matrix,
    compute_features,
    export_matrix,
)
from .scaling import DEFAULT_RANGES, TARGET, MinMaxScaler, ScaledData, fit_scaler, inverse_transform, transform

__all__ = [
    'FEATURE_NAMES',
    'N_FEATURES',
    'FeatureError',
    'FeatureMatrix',
    'FeatureVector',
    'build_matrix',
    'compute_features',
    'export_matrix',
    'DEFAULT_RANGES',
    'TARGET',
    'MinMaxScaler',
    'ScaledData',
    'fit_scaler',
    'inverse_transform',
    'transform',
]
