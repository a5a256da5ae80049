import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from algorithms.base_forecaster import BaseForecaster
from algorithms.fusion import LateFusionForecaster
from algorithms.neural import OPTIMIZERS, make_optimizer, mse_grad, mse_loss
from features import ScaledData
from market_data import DataSplit

logger = logging.getLogger(__name__)


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 32
    max_epochs: int = 100
    patience: int = 10
    optimizer: str = "adam"
    learning_rate: float = 0.001
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise TrainingError("batch_size, max_epochs and patience must be >= 1")
        if self.patience >= self.max_epochs:
            raise TrainingError(f"patience ({self.patience}) must be below max_epochs ({self.max_epochs})")
        if self.optimizer not in OPTIMIZERS:
            raise TrainingError(f"unknown optimizer {self.optimizer!r}")
        if not self.learning_rate > 0:
            raise TrainingError("learning_rate must be positive")


@dataclass
class EpochLog:
    """Losses per epoch (1-based epochs). Late fusion keeps one log per branch in `branch_logs`."""

    train_loss: List[float] = field(default_factory=list)
    val_loss: List[float] = field(default_factory=list)
    best_epoch: int = 0
    stopped_epoch: int = 0
    branch_logs: Dict[str, "EpochLog"] = field(default_factory=dict)

    @property
    def best_val_loss(self) -> float:
        return self.val_loss[self.best_epoch - 1]

    def rows(self) -> List[Tuple[int, float, float]]:
        return [(i + 1, t, v) for i, (t, v) in enumerate(zip(self.train_loss, self.val_loss))]


class EarlyStopping:
    """
    Patience counter on validation loss. Only a strictly lower loss counts
    as an improvement; the counter resets on every improvement.
    """

    def __init__(self, patience: int):
        self.patience = patience
        self.best_loss = math.inf
        self.best_epoch = 0
        self.wait = 0

    def update(self, epoch: int, val_loss: float) -> bool:
        """Record one epoch; returns True if it improved on the best loss."""
        if val_loss < self.best_loss:
            self.best_loss = val_loss
            self.best_epoch = epoch
            self.wait = 0
            return True
        self.wait += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self.wait >= self.patience


def simulate_early_stopping(val_losses: Sequence[float], patience: int, max_epochs: int) -> Tuple[int, int]:
    """(best_epoch, stopped_epoch) the training loop would report for a scripted loss sequence."""
    stopper = EarlyStopping(patience)
    epoch = 0
    for epoch, loss in enumerate(val_losses[:max_epochs], start=1):
        stopper.update(epoch, loss)
        if stopper.should_stop:
            break
    return stopper.best_epoch, epoch


def evaluate_partition(model: BaseForecaster, data: ScaledData, rows: Sequence[int]) -> float:
    rows = np.asarray(rows)
    if rows.size == 0:
        raise TrainingError("cannot evaluate an empty partition")
    return mse_loss(model.predict(data.inputs[rows]), data.target[rows])


def evaluate_validation(model: BaseForecaster, data: ScaledData, split: DataSplit) -> float:
    """Inference-mode MSE on the validation rows, in scaled units."""
    return evaluate_partition(model, data, split.validation)


def _batches(order: np.ndarray, batch_size: int, min_rows: int) -> List[np.ndarray]:
    batches = [order[i:i + batch_size] for i in range(0, len(order), batch_size)]
    # a 1-row tail cannot be batch-normalised; fold it into the previous batch
    if len(batches) > 1 and len(batches[-1]) < min_rows:
        batches[-2] = np.concatenate([batches[-2], batches.pop()])
    return batches


def train(model: BaseForecaster, data: ScaledData, split: DataSplit, cfg: TrainConfig) -> Tuple[BaseForecaster, EpochLog]:
    """
    Mini-batch training with per-epoch seeded shuffling of the training rows
    and early stopping on validation MSE. The model is updated in place and
    left holding the parameters of the best epoch.
    """
    if len(split.train) == 0 or len(split.validation) == 0:
        raise TrainingError("training and validation partitions must be non-empty")
    if split.n_rows != len(data):
        raise TrainingError(f"split covers {split.n_rows} rows but data has {len(data)}")
    if isinstance(model, LateFusionForecaster):
        return _train_late_fusion(model, data, split, cfg)

    min_rows = 2 if model.uses_batch_norm else 1
    if len(split.train) < min_rows:
        raise TrainingError("batch normalisation needs at least 2 training rows")
    if cfg.batch_size < min_rows:
        raise TrainingError("batch_size must be >= 2 when batch normalisation is active")

    rng = np.random.default_rng(cfg.seed)
    optimizer = make_optimizer(cfg.optimizer, cfg.learning_rate)
    params = model.parameters()
    train_rows = np.asarray(split.train)
    stopper = EarlyStopping(cfg.patience)
    log = EpochLog()
    best = model.snapshot()

    for epoch in range(1, cfg.max_epochs + 1):
        order = train_rows[rng.permutation(len(train_rows))]
        total = 0.0
        for b, batch in enumerate(_batches(order, cfg.batch_size, min_rows)):
            predictions, cache = model.forward(data.inputs[batch], mode="train", rng=rng)
            loss = mse_loss(predictions, data.target[batch])
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch}, batch {b}")
            grads = model.backward(cache, mse_grad(predictions, data.target[batch]))
            optimizer.step(params, grads)
            total += loss * len(batch)

        val = evaluate_validation(model, data, split)
        log.train_loss.append(total / len(train_rows))
        log.val_loss.append(val)
        if stopper.update(epoch, val):
            best = model.snapshot()
        logger.debug("epoch %d train=%.6g val=%.6g", epoch, log.train_loss[-1], val)
        log.stopped_epoch = epoch
        if stopper.should_stop:
            break

    if stopper.best_epoch == 0:
        raise TrainingError("validation loss was never finite")
    model.restore(best)
    log.best_epoch = stopper.best_epoch
    logger.debug("stopped at epoch %d, restored epoch %d (val=%.6g)", log.stopped_epoch, log.best_epoch, stopper.best_loss)
    return model, log


def _train_late_fusion(model: LateFusionForecaster, data: ScaledData, split: DataSplit, cfg: TrainConfig):
    log = EpochLog()
    for k, (name, branch) in enumerate(model.branches.items()):
        seed = int(np.random.SeedSequence([cfg.seed, k]).generate_state(1)[0])
        _, log.branch_logs[name] = train(branch, data, split, replace(cfg, seed=seed))
    # the combination itself has no trainable weights: a single summary epoch
    log.train_loss.append(evaluate_partition(model, data, split.train))
    log.val_loss.append(evaluate_validation(model, data, split))
    log.best_epoch = log.stopped_epoch = 1
    return model, log
