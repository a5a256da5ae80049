from dataclasses import dataclass
from typing import Any, Dict, Iterable, Mapping, Tuple

import numpy as np


class SearchError(ValueError):
    pass


Config = Dict[str, Any]


@dataclass(frozen=True)
class Dimension:
    name: str
    choices: Tuple[Any, ...]

    def __post_init__(self):
        if not self.choices:
            raise SearchError(f"dimension {self.name!r} has no choices")
        object.__setattr__(self, "choices", tuple(self.choices))

    @property
    def is_singleton(self) -> bool:
        return len(self.choices) == 1

    def index(self, value: Any) -> int:
        try:
            return self.choices.index(value)
        except ValueError:
            raise SearchError(f"{value!r} is not a choice of {self.name!r} {self.choices}") from None


@dataclass(frozen=True)
class SearchSpace:
    """Flat space of categorical dimensions, kept in declaration order."""

    dimensions: Tuple[Dimension, ...]

    def __post_init__(self):
        names = [d.name for d in self.dimensions]
        if len(set(names)) != len(names):
            raise SearchError(f"duplicate dimension names in {names}")

    @classmethod
    def from_mapping(cls, choices: Mapping[str, Iterable[Any]]) -> "SearchSpace":
        return cls(tuple(Dimension(name, tuple(values)) for name, values in choices.items()))

    @classmethod
    def standard(cls, head_layers: bool = False) -> "SearchSpace":
        """
        Hidden layers {2,3}, units {2,4,8,16}, dropout {0.25,0.5,0.75},
        batch size {32,64,128}, three optimizers, three activations, and the
        fixed learning rate and epoch cap. `head_layers` adds the depth of the
        intermediate-fusion head, drawn from the same {2,3} domain.
        """
        choices = {
            "hidden_layers": (2, 3),
            "hidden_units": (2, 4, 8, 16),
            "dropout": (0.25, 0.5, 0.75),
            "batch_size": (32, 64, 128),
            "optimizer": ("rmsprop", "adam", "sgd"),
            "activation": ("tanh", "relu", "sigmoid"),
            "learning_rate": (0.001,),
            "epochs": (100,),
        }
        if head_layers:
            choices["head_layers"] = (2, 3)
        return cls.from_mapping(choices)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(d.name for d in self.dimensions)

    def __getitem__(self, name: str) -> Dimension:
        for dim in self.dimensions:
            if dim.name == name:
                return dim
        raise SearchError(f"unknown dimension {name!r}")

    def contains(self, config: Mapping[str, Any]) -> bool:
        if set(config) != set(self.names):
            return False
        return all(config[d.name] in d.choices for d in self.dimensions)

    def sample_uniform(self, rng: np.random.Generator) -> Config:
        return {d.name: d.choices[int(rng.integers(len(d.choices)))] for d in self.dimensions}
