from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from market_data import DataSplit
from .pipeline import FeatureError, FeatureMatrix

ArrayLike = Union[float, np.ndarray]

DEFAULT_RANGES = ((-1.0, 1.0), (0.0, 1.0), (-0.5, 0.5))
TARGET = "target"


@dataclass(frozen=True)
class MinMaxScaler:
    """Per-column affine map fitted on training rows only. No clipping outside the training range."""

    columns: Tuple[str, ...]
    train_min: np.ndarray
    train_max: np.ndarray
    out_min: float
    out_max: float

    def _index(self, column: str) -> int:
        try:
            return self.columns.index(column)
        except ValueError:
            raise FeatureError(f"scaler has no column {column!r}") from None

    def transform(self, x: ArrayLike, column: str) -> ArrayLike:
        i = self._index(column)
        lo, hi = self.train_min[i], self.train_max[i]
        return (x - lo) / (hi - lo) * (self.out_max - self.out_min) + self.out_min

    def inverse_transform(self, y: ArrayLike, column: str) -> ArrayLike:
        i = self._index(column)
        lo, hi = self.train_min[i], self.train_max[i]
        return (y - self.out_min) / (self.out_max - self.out_min) * (hi - lo) + lo

    def transform_matrix(self, matrix: FeatureMatrix) -> "ScaledData":
        inputs = matrix.inputs
        scaled = np.empty_like(inputs)
        for j, name in enumerate(matrix.column_names):
            scaled[:, j] = self.transform(inputs[:, j], name)
        return ScaledData(inputs=scaled, target=self.transform(matrix.target, TARGET), scaler=self)

    @property
    def feature_range(self) -> Tuple[float, float]:
        return self.out_min, self.out_max


@dataclass(frozen=True)
class ScaledData:
    inputs: np.ndarray
    target: np.ndarray
    scaler: MinMaxScaler

    def __len__(self) -> int:
        return len(self.target)


def fit_scaler(matrix: FeatureMatrix, split: DataSplit, feature_range: Tuple[float, float] = (-1.0, 1.0)) -> MinMaxScaler:
    out_min, out_max = float(feature_range[0]), float(feature_range[1])
    if not out_max > out_min:
        raise FeatureError(f"invalid output range [{out_min}, {out_max}]")
    if len(split.train) == 0:
        raise FeatureError("empty training partition")

    train_rows = np.asarray(split.train)
    table = np.column_stack([matrix.inputs[train_rows], matrix.target[train_rows]])
    lo, hi = table.min(axis=0), table.max(axis=0)
    columns = tuple(matrix.column_names) + (TARGET,)
    flat = [c for c, a, b in zip(columns, lo, hi) if not b > a]
    if flat:
        raise FeatureError(f"constant training column(s): {', '.join(flat)}")
    return MinMaxScaler(columns, lo, hi, out_min, out_max)


def transform(scaler: MinMaxScaler, x: ArrayLike, column: str) -> ArrayLike:
    return scaler.transform(x, column)


def inverse_transform(scaler: MinMaxScaler, y: ArrayLike, column: str) -> ArrayLike:
    return scaler.inverse_transform(y, column)
