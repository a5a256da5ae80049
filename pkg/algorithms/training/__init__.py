from .trainer import (
    EarlyStopping,
    EpochLog,
    TrainConfig,
    TrainingError,
    evaluate_partition,
    evaluate_validation,
    simulate_early_stopping,
    train,
)

__all__ = [
    'EarlyStopping',
    'EpochLog',
    'TrainConfig',
    'TrainingError',
    'evaluate_partition',
    'evaluate_validation',
    'simulate_early_stopping',
    'train',
]
