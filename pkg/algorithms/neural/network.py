import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .layers import (
    BN_EPSILON,
    BN_MOMENTUM,
    LayerSpec,
    NetworkError,
    activate,
    activation_grad,
    dropout_mask,
    glorot_init,
)

logger = logging.getLogger(__name__)

TRAINABLE_KEYS = ("W", "b", "gamma", "beta")
STATE_KEYS = ("running_mean", "running_var")


@dataclass
class NetworkParams:
    """Weights, biases and batch-norm parameters/statistics of a stack of dense layers."""

    specs: Tuple[LayerSpec, ...]
    layers: List[Dict[str, np.ndarray]]

    def __post_init__(self):
        self.specs = tuple(self.specs)
        if len(self.specs) != len(self.layers):
            raise NetworkError("one parameter dict per layer spec is required")
        for prev, cur in zip(self.specs, self.specs[1:]):
            if prev.fan_out != cur.fan_in:
                raise NetworkError(f"layer chain mismatch: {prev.fan_out} -> {cur.fan_in}")
        for spec, layer in zip(self.specs, self.layers):
            if layer["W"].shape != (spec.fan_in, spec.fan_out) or layer["b"].shape != (spec.fan_out,):
                raise NetworkError("parameter shapes do not match the layer spec")
            if spec.batch_norm and np.any(layer["running_var"] < 0):
                raise NetworkError("running variance must be non-negative")

    @classmethod
    def initialize(cls, specs: Sequence[LayerSpec], rng: np.random.Generator) -> "NetworkParams":
        return cls(tuple(specs), [glorot_init(spec, rng) for spec in specs])

    @property
    def input_width(self) -> int:
        return self.specs[0].fan_in

    @property
    def output_width(self) -> int:
        return self.specs[-1].fan_out

    @property
    def uses_batch_norm(self) -> bool:
        return any(spec.batch_norm for spec in self.specs)

    def trainable(self) -> List[np.ndarray]:
        """Trainable arrays in a fixed order; gradients from `backward` use the same order."""
        return [layer[k] for layer in self.layers for k in TRAINABLE_KEYS if k in layer]

    def copy(self) -> "NetworkParams":
        return NetworkParams(self.specs, [{k: v.copy() for k, v in layer.items()} for layer in self.layers])

    def load_from(self, other: "NetworkParams") -> None:
        """Overwrite every array in place (keeps optimizer references valid)."""
        for mine, theirs in zip(self.layers, other.layers):
            for key, value in theirs.items():
                mine[key][...] = value


@dataclass
class ForwardCache:
    inputs: List[np.ndarray] = field(default_factory=list)
    pre_activation: List[np.ndarray] = field(default_factory=list)
    post_activation: List[np.ndarray] = field(default_factory=list)
    normalized: List[Optional[np.ndarray]] = field(default_factory=list)
    inv_std: List[Optional[np.ndarray]] = field(default_factory=list)
    masks: List[Optional[np.ndarray]] = field(default_factory=list)


def forward(
    params: NetworkParams,
    batch: np.ndarray,
    mode: str = "inference",
    rng: Optional[np.random.Generator] = None,
    masks: Optional[Sequence[Optional[np.ndarray]]] = None,
    update_stats: bool = True,
) -> Tuple[np.ndarray, Optional[ForwardCache]]:
    """
    Run the layer stack. Training mode normalises with batch statistics
    (population variance), refreshes running statistics and applies inverted
    dropout; inference mode uses running statistics and no dropout.

    `masks` replays fixed dropout masks (one entry per layer, None = no dropout).
    """
    if mode not in ("train", "inference"):
        raise NetworkError(f"unknown mode {mode!r}")
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.input_width:
        raise NetworkError(f"expected batch of shape (n, {params.input_width}), got {x.shape}")
    training = mode == "train"
    if training and params.uses_batch_norm and x.shape[0] < 2:
        raise NetworkError("batch normalisation needs at least 2 rows in training mode")
    if training and masks is None and rng is None and any(s.dropout_rate > 0 for s in params.specs):
        raise NetworkError("training with dropout needs an rng or explicit masks")

    cache = ForwardCache() if training else None
    for i, (spec, layer) in enumerate(zip(params.specs, params.layers)):
        z = x @ layer["W"] + layer["b"]
        zhat = inv_std = None
        if spec.batch_norm:
            if training:
                mean, var = z.mean(axis=0), z.var(axis=0)
                inv_std = 1.0 / np.sqrt(var + BN_EPSILON)
                zhat = (z - mean) * inv_std
                if update_stats:
                    layer["running_mean"][...] = BN_MOMENTUM * layer["running_mean"] + (1 - BN_MOMENTUM) * mean
                    layer["running_var"][...] = BN_MOMENTUM * layer["running_var"] + (1 - BN_MOMENTUM) * var
            else:
                zhat = (z - layer["running_mean"]) / np.sqrt(layer["running_var"] + BN_EPSILON)
            h = layer["gamma"] * zhat + layer["beta"]
        else:
            h = z
        out = activate(h, spec.activation)

        mask = None
        if training:
            if masks is not None:
                mask = masks[i]
            elif spec.dropout_rate > 0:
                mask = dropout_mask(spec.dropout_rate, out.shape, rng)
            cache.inputs.append(x)
            cache.pre_activation.append(h)
            cache.post_activation.append(out)
            cache.normalized.append(zhat)
            cache.inv_std.append(inv_std)
            cache.masks.append(mask)
        x = out if mask is None else out * mask
    return x, cache


def backward(params: NetworkParams, cache: Optional[ForwardCache], loss_grad: np.ndarray) -> Tuple[List[np.ndarray], np.ndarray]:
    """
    Exact gradients for every trainable array (same order as
    `params.trainable()`), plus the gradient with respect to the input batch.
    `loss_grad` is dLoss/dOutput with the output's shape.
    """
    if cache is None or not cache.inputs:
        raise NetworkError("backward needs the cache of a training-mode forward pass")
    grad = np.asarray(loss_grad, dtype=np.float64)
    if grad.ndim == 1:
        grad = grad.reshape(-1, 1)

    per_layer: List[Dict[str, np.ndarray]] = [dict() for _ in params.specs]
    for i in reversed(range(len(params.specs))):
        spec, layer = params.specs[i], params.layers[i]
        if cache.masks[i] is not None:
            grad = grad * cache.masks[i]
        grad = grad * activation_grad(cache.pre_activation[i], cache.post_activation[i], spec.activation)

        if spec.batch_norm:
            zhat, inv_std = cache.normalized[i], cache.inv_std[i]
            n = grad.shape[0]
            per_layer[i]["gamma"] = np.sum(grad * zhat, axis=0)
            per_layer[i]["beta"] = np.sum(grad, axis=0)
            dzhat = grad * layer["gamma"]
            grad = (inv_std / n) * (n * dzhat - dzhat.sum(axis=0) - zhat * np.sum(dzhat * zhat, axis=0))

        per_layer[i]["W"] = cache.inputs[i].T @ grad
        per_layer[i]["b"] = grad.sum(axis=0)
        grad = grad @ layer["W"].T

    grads = [per_layer[i][k] for i, layer in enumerate(params.layers) for k in TRAINABLE_KEYS if k in layer]
    return grads, grad


def mse_loss(predictions: np.ndarray, targets: np.ndarray) -> float:
    predictions = np.ravel(np.asarray(predictions, dtype=np.float64))
    targets = np.ravel(np.asarray(targets, dtype=np.float64))
    if predictions.shape != targets.shape or predictions.size == 0:
        raise NetworkError(f"length mismatch: {predictions.size} predictions vs {targets.size} targets")
    return float(np.mean((predictions - targets) ** 2))


def mse_grad(predictions: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """dMSE/dpredictions for a mean-reduced loss."""
    predictions = np.ravel(np.asarray(predictions, dtype=np.float64))
    targets = np.ravel(np.asarray(targets, dtype=np.float64))
    if predictions.shape != targets.shape or predictions.size == 0:
        raise NetworkError(f"length mismatch: {predictions.size} predictions vs {targets.size} targets")
    return 2.0 * (predictions - targets) / predictions.size
