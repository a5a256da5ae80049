from .space import Config, Dimension, SearchError, SearchSpace
from .sampler import (
    COMPLETED,
    FAILED,
    TpeConfig,
    Trial,
    optimize,
    parzen_categorical_weights,
    random_search,
    split_good_bad,
    suggest,
)

__all__ = [
    'Config',
    'Dimension',
    'SearchError',
    'SearchSpace',
    'COMPLETED',
    'FAILED',
    'TpeConfig',
    'Trial',
    'optimize',
    'parzen_categorical_weights',
    'random_search',
    'split_good_bad',
    'suggest',
]
