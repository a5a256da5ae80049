from dataclasses import asdict, dataclass
from typing import Dict, Optional, Tuple

from algorithms.base_forecaster import MODALITY_WIDTH
from algorithms.neural import ACTIVATIONS, LayerSpec, NetworkError

VARIANTS = ("single_modal", "early_fusion", "intermediate_fusion", "late_fusion")
SOURCES = ("domestic", "foreign")


@dataclass(frozen=True)
class ModelSpec:
    """
    Architecture variant plus the shared hidden-layer hyperparameters.

    All branches of one model share hidden_layers/hidden_units/activation/
    dropout. `head_layers` is the hidden depth of the intermediate-fusion
    head (defaults to hidden_layers); `source` only matters for single_modal.
    """

    variant: str
    source: str = "domestic"
    hidden_layers: int = 2
    hidden_units: int = 8
    activation: str = "relu"
    dropout_rate: float = 0.25
    batch_norm: bool = True
    lam: float = 0.5
    head_layers: Optional[int] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise NetworkError(f"unknown variant {self.variant!r}")
        if self.source not in SOURCES:
            raise NetworkError(f"unknown source market {self.source!r}")
        if self.hidden_layers < 1 or self.hidden_units < 1:
            raise NetworkError("hidden_layers and hidden_units must be >= 1")
        if self.head_layers is not None and self.head_layers < 1:
            raise NetworkError("head_layers must be >= 1")
        if self.activation not in ACTIVATIONS:
            raise NetworkError(f"unknown activation {self.activation!r}")
        if not 0.0 <= self.lam <= 1.0:
            raise NetworkError(f"late-fusion weight must be in [0, 1], got {self.lam}")

    def hidden_stack(self, fan_in: int, depth: Optional[int] = None) -> Tuple[LayerSpec, ...]:
        layers = []
        width = fan_in
        for _ in range(depth or self.hidden_layers):
            layers.append(LayerSpec(width, self.hidden_units, self.activation, self.batch_norm, self.dropout_rate))
            width = self.hidden_units
        return tuple(layers)

    def regressor(self, fan_in: int, depth: Optional[int] = None) -> Tuple[LayerSpec, ...]:
        """Hidden stack followed by a single linear output unit."""
        hidden = self.hidden_stack(fan_in, depth)
        return hidden + (LayerSpec(self.hidden_units, 1, "linear"),)

    def sub_specs(self) -> Dict[str, Tuple[LayerSpec, ...]]:
        """Layer chains of every network the variant owns, keyed by network name."""
        if self.variant == "single_modal":
            return {"network": self.regressor(MODALITY_WIDTH)}
        if self.variant == "early_fusion":
            return {"network": self.regressor(2 * MODALITY_WIDTH)}
        if self.variant == "late_fusion":
            return {"domestic": self.regressor(MODALITY_WIDTH), "foreign": self.regressor(MODALITY_WIDTH)}
        return {
            "domestic_branch": self.hidden_stack(MODALITY_WIDTH),
            "foreign_branch": self.hidden_stack(MODALITY_WIDTH),
            "head": self.regressor(2 * self.hidden_units, self.head_layers or self.hidden_layers),
        }

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        return cls(**data)
