from typing import List

import numpy as np

from algorithms.base_forecaster import BaseForecaster
from algorithms.neural import backward, forward


class IntermediateFusionForecaster(BaseForecaster):
    """
    Two per-market branches without output units; their last hidden layers
    are concatenated and fed to a head network. Branches and head form one
    differentiable graph and are trained jointly.
    """

    BRANCHES = ("domestic_branch", "foreign_branch")
    HEAD = "head"

    def _branch_inputs(self, rows):
        return {"domestic_branch": rows[:, self.DOMESTIC], "foreign_branch": rows[:, self.FOREIGN]}

    def forward(self, rows, mode="inference", rng=None, masks=None, update_stats=True):
        rows = self.check_rows(rows)
        inputs = self._branch_inputs(rows)
        caches = {}
        hidden = []
        for name in self.BRANCHES + (self.HEAD,):
            x = np.hstack(hidden) if name == self.HEAD else inputs[name]
            out, cache = forward(
                self.networks[name], x, mode=mode, rng=rng,
                masks=None if masks is None else masks[name],
                update_stats=update_stats,
            )
            caches[name] = cache
            if name != self.HEAD:
                hidden.append(out)
        return out[:, 0], (caches if mode == "train" else None)

    def backward(self, cache: dict, loss_grad: np.ndarray) -> List[np.ndarray]:
        head_grads, d_hidden = backward(self.networks[self.HEAD], cache[self.HEAD], loss_grad)
        split = self.networks["domestic_branch"].output_width
        branch_grads = {}
        for name, d_out in zip(self.BRANCHES, (d_hidden[:, :split], d_hidden[:, split:])):
            branch_grads[name], _ = backward(self.networks[name], cache[name], d_out)
        return branch_grads["domestic_branch"] + branch_grads["foreign_branch"] + head_grads
