from typing import List, Optional, Tuple

import numpy as np

from algorithms.base_forecaster import BaseForecaster
from algorithms.neural import backward, forward


class SingleModalForecaster(BaseForecaster):
    """
    One dense network fed by one market's five features.

    Subclasses only change which columns reach the network (see
    EarlyFusionForecaster), the training path is shared.
    """

    NETWORK = "network"

    def select_inputs(self, rows: np.ndarray) -> np.ndarray:
        return rows[:, self.DOMESTIC] if self.spec.source == "domestic" else rows[:, self.FOREIGN]

    def forward(self, rows, mode="inference", rng=None, masks=None, update_stats=True) -> Tuple[np.ndarray, Optional[dict]]:
        rows = self.check_rows(rows)
        out, cache = forward(
            self.networks[self.NETWORK],
            self.select_inputs(rows),
            mode=mode,
            rng=rng,
            masks=None if masks is None else masks[self.NETWORK],
            update_stats=update_stats,
        )
        return out[:, 0], (None if cache is None else {self.NETWORK: cache})

    def backward(self, cache: dict, loss_grad: np.ndarray) -> List[np.ndarray]:
        grads, _ = backward(self.networks[self.NETWORK], cache[self.NETWORK], loss_grad)
        return grads
