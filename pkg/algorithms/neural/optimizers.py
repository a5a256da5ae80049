from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from .layers import NetworkError

OPTIMIZERS = ("sgd", "rmsprop", "adam")


@dataclass
class OptimizerState:
    kind: str
    learning_rate: float
    accumulators: Dict[str, List[np.ndarray]] = field(default_factory=dict)
    step_count: int = 0


class Optimizer:
    """Updates parameter arrays in place. Accumulators are created on the first step."""

    kind = ""

    def __init__(self, learning_rate: float = 0.001):
        self.state = OptimizerState(kind=self.kind, learning_rate=learning_rate)

    def step(self, params: Sequence[np.ndarray], grads: Sequence[np.ndarray]) -> OptimizerState:
        if len(params) != len(grads):
            raise NetworkError(f"{len(params)} parameters but {len(grads)} gradients")
        for p, g in zip(params, grads):
            if p.shape != g.shape:
                raise NetworkError(f"gradient shape {g.shape} does not match parameter {p.shape}")
        self.state.step_count += 1
        self._update(params, grads)
        return self.state

    def _slots(self, name: str, params: Sequence[np.ndarray]) -> List[np.ndarray]:
        if name not in self.state.accumulators:
            self.state.accumulators[name] = [np.zeros_like(p) for p in params]
        slots = self.state.accumulators[name]
        if any(s.shape != p.shape for s, p in zip(slots, params)) or len(slots) != len(params):
            raise NetworkError("optimizer state does not mirror the parameters")
        return slots

    def _update(self, params, grads):
        raise NotImplementedError("Subclasses must implement _update()")


class SGD(Optimizer):
    kind = "sgd"

    def _update(self, params, grads):
        lr = self.state.learning_rate
        for p, g in zip(params, grads):
            p -= lr * g


class RMSProp(Optimizer):
    kind = "rmsprop"

    def __init__(self, learning_rate: float = 0.001, decay: float = 0.9, epsilon: float = 1e-8):
        super().__init__(learning_rate)
        self.decay = decay
        self.epsilon = epsilon

    def _update(self, params, grads):
        lr = self.state.learning_rate
        for p, g, s in zip(params, grads, self._slots("square_avg", params)):
            s *= self.decay
            s += (1 - self.decay) * g ** 2
            p -= lr * g / np.sqrt(s + self.epsilon)


class Adam(Optimizer):
    kind = "adam"

    def __init__(self, learning_rate: float = 0.001, beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8):
        super().__init__(learning_rate)
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon

    def _update(self, params, grads):
        lr, t = self.state.learning_rate, self.state.step_count
        first, second = self._slots("m", params), self._slots("v", params)
        for p, g, m, v in zip(params, grads, first, second):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g ** 2
            m_hat = m / (1 - self.beta1 ** t)
            v_hat = v / (1 - self.beta2 ** t)
            p -= lr * m_hat / (np.sqrt(v_hat) + self.epsilon)


def make_optimizer(kind: str, learning_rate: float = 0.001) -> Optimizer:
    registry = {"sgd": SGD, "rmsprop": RMSProp, "adam": Adam}
    if kind not in registry:
        raise NetworkError(f"unknown optimizer {kind!r}")
    return registry[kind](learning_rate)


def optimizer_step(optimizer: Optimizer, params: Sequence[np.ndarray], grads: Sequence[np.ndarray]) -> OptimizerState:
    return optimizer.step(params, grads)
