from dataclasses import replace
from typing import Dict, List

import numpy as np

from algorithms.base_forecaster import BaseForecaster
from algorithms.neural import NetworkError
from .single_modal import SingleModalForecaster


def late_fusion_combine(r_ko, r_us, lam: float = 0.5):
    """lam * domestic prediction + (1 - lam) * foreign prediction."""
    if not 0.0 <= lam <= 1.0:
        raise NetworkError(f"late-fusion weight must be in [0, 1], got {lam}")
    return lam * r_ko + (1.0 - lam) * r_us


class LateFusionForecaster(BaseForecaster):
    """
    Two independent single-modal forecasters whose predictions are mixed by a
    fixed weight. The trainer fits each branch on its own (own early stopping);
    forward/backward over the combination exist for evaluation and gradient checks.
    """

    BRANCHES = ("domestic", "foreign")

    @property
    def branches(self) -> Dict[str, SingleModalForecaster]:
        return {
            name: SingleModalForecaster(
                replace(self.spec, variant="single_modal", source=name),
                {SingleModalForecaster.NETWORK: self.networks[name]},
            )
            for name in self.BRANCHES
        }

    def forward(self, rows, mode="inference", rng=None, masks=None, update_stats=True):
        rows = self.check_rows(rows)
        outputs, caches = {}, {}
        for name, branch in self.branches.items():
            branch_masks = None if masks is None else {SingleModalForecaster.NETWORK: masks[name]}
            outputs[name], cache = branch.forward(rows, mode=mode, rng=rng, masks=branch_masks, update_stats=update_stats)
            if cache is not None:
                caches[name] = cache[SingleModalForecaster.NETWORK]
        combined = late_fusion_combine(outputs["domestic"], outputs["foreign"], self.spec.lam)
        return combined, (caches if mode == "train" else None)

    def backward(self, cache: dict, loss_grad: np.ndarray) -> List[np.ndarray]:
        grads = []
        for name, weight in zip(self.BRANCHES, (self.spec.lam, 1.0 - self.spec.lam)):
            branch = self.branches[name]
            grads += branch.backward({SingleModalForecaster.NETWORK: cache[name]}, np.asarray(loss_grad) * weight)
        return grads
