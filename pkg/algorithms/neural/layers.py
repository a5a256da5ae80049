from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np

ACTIVATIONS = ("tanh", "relu", "sigmoid", "linear")

BN_EPSILON = 1e-5
BN_MOMENTUM = 0.99


class NetworkError(ValueError):
    pass


@dataclass(frozen=True)
class LayerSpec:
    """One dense layer: affine -> batch norm (optional) -> activation -> dropout (training only)."""

    fan_in: int
    fan_out: int
    activation: str = "relu"
    batch_norm: bool = False
    dropout_rate: float = 0.0

    def __post_init__(self):
        if self.fan_in < 1 or self.fan_out < 1:
            raise NetworkError(f"layer widths must be >= 1, got {self.fan_in}x{self.fan_out}")
        if self.activation not in ACTIVATIONS:
            raise NetworkError(f"unknown activation {self.activation!r}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise NetworkError(f"dropout rate must be in [0, 1), got {self.dropout_rate}")

    def to_dict(self) -> dict:
        return {
            "fan_in": self.fan_in,
            "fan_out": self.fan_out,
            "activation": self.activation,
            "batch_norm": self.batch_norm,
            "dropout_rate": self.dropout_rate,
        }


def glorot_init(spec: LayerSpec, rng: np.random.Generator) -> Dict[str, np.ndarray]:
    """Glorot normal weights (std = sqrt(2 / (fan_in + fan_out))), zero biases, unit BN scale."""
    std = np.sqrt(2.0 / (spec.fan_in + spec.fan_out))
    layer = {
        "W": rng.normal(0.0, std, size=(spec.fan_in, spec.fan_out)),
        "b": np.zeros(spec.fan_out),
    }
    if spec.batch_norm:
        layer["gamma"] = np.ones(spec.fan_out)
        layer["beta"] = np.zeros(spec.fan_out)
        layer["running_mean"] = np.zeros(spec.fan_out)
        layer["running_var"] = np.ones(spec.fan_out)
    return layer


def dropout_mask(rate: float, width: Union[int, Tuple[int, ...]], rng: np.random.Generator) -> np.ndarray:
    """Inverted dropout: 0 with probability `rate`, else 1/(1-rate)."""
    if not 0.0 <= rate < 1.0:
        raise NetworkError(f"dropout rate must be in [0, 1), got {rate}")
    if rate == 0.0:
        return np.ones(width)
    keep = rng.random(width) >= rate
    return keep / (1.0 - rate)


def activate(h: np.ndarray, kind: str) -> np.ndarray:
    if kind == "tanh":
        return np.tanh(h)
    if kind == "relu":
        return np.maximum(h, 0.0)
    if kind == "sigmoid":
        return 1.0 / (1.0 + np.exp(-h))
    return h


def activation_grad(h: np.ndarray, out: np.ndarray, kind: str) -> np.ndarray:
    """d out / d h, given the pre-activation h and the activation output."""
    if kind == "tanh":
        return 1.0 - out ** 2
    if kind == "relu":
        return (h > 0).astype(np.float64)
    if kind == "sigmoid":
        return out * (1.0 - out)
    return np.ones_like(h)
