from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

import numpy as np

from algorithms.neural import NetworkError, NetworkParams

if TYPE_CHECKING:
    from algorithms.fusion.spec import ModelSpec

MODALITY_WIDTH = 5


class BaseForecaster(ABC):
    """
    Common surface of the four architectures. Input rows are always the full
    10-column feature row (domestic block, then foreign block); each
    architecture picks what it needs.
    """

    ROW_WIDTH = 2 * MODALITY_WIDTH
    DOMESTIC = slice(0, MODALITY_WIDTH)
    FOREIGN = slice(MODALITY_WIDTH, 2 * MODALITY_WIDTH)

    def __init__(self, spec: "ModelSpec", networks: Dict[str, NetworkParams]):
        self.spec = spec
        self.networks = networks

    @abstractmethod
    def forward(self, rows: np.ndarray, mode: str = "inference", rng: Optional[np.random.Generator] = None,
                masks: Optional[dict] = None, update_stats: bool = True) -> Tuple[np.ndarray, Optional[dict]]:
        raise NotImplementedError("Subclasses must implement forward()")

    @abstractmethod
    def backward(self, cache: dict, loss_grad: np.ndarray) -> List[np.ndarray]:
        raise NotImplementedError("Subclasses must implement backward()")

    def parameters(self) -> List[np.ndarray]:
        """Trainable arrays of all networks, in network order; backward() returns gradients in the same order."""
        return [p for net in self.networks.values() for p in net.trainable()]

    @property
    def uses_batch_norm(self) -> bool:
        return any(net.uses_batch_norm for net in self.networks.values())

    def check_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != self.ROW_WIDTH:
            raise NetworkError(f"expected feature rows of shape (n, {self.ROW_WIDTH}), got {rows.shape}")
        return rows

    def predict(self, rows: np.ndarray, mode: str = "inference", rng: Optional[np.random.Generator] = None):
        """One scalar per row; in training mode also returns the backward cache."""
        predictions, cache = self.forward(rows, mode=mode, rng=rng)
        return predictions if mode == "inference" else (predictions, cache)

    @staticmethod
    def dropout_masks(cache: dict) -> dict:
        """Masks drawn by a training pass, in the shape forward(masks=...) replays them."""
        return {name: c.masks for name, c in cache.items()}

    def snapshot(self) -> Dict[str, NetworkParams]:
        return {name: net.copy() for name, net in self.networks.items()}

    def restore(self, snapshot: Dict[str, NetworkParams]) -> None:
        for name, net in self.networks.items():
            net.load_from(snapshot[name])

    def __repr__(self) -> str:
        widths = {name: [net.input_width] + [s.fan_out for s in net.specs] for name, net in self.networks.items()}
        return f"{type(self).__name__}({widths})"
