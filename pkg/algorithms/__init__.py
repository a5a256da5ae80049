from .base_forecaster import BaseForecaster
from .fusion import (
    EarlyFusionForecaster,
    IntermediateFusionForecaster,
    LateFusionForecaster,
    ModelSpec,
    SingleModalForecaster,
    build_model,
)
from .training import EpochLog, TrainConfig, train
from .tpe import SearchSpace, TpeConfig, Trial, optimize

__all__ = [
    'BaseForecaster',
    'SingleModalForecaster',
    'EarlyFusionForecaster',
    'IntermediateFusionForecaster',
    'LateFusionForecaster',
    'ModelSpec',
    'build_model',
    'EpochLog',
    'TrainConfig',
    'train',
    'SearchSpace',
    'TpeConfig',
    'Trial',
    'optimize',
]
