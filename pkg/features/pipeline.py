import logging
from dataclasses import dataclass
from datetime import date
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np
import pandas as pd

from market_data import AlignedPair, OhlcBar

logger = logging.getLogger(__name__)

FEATURE_NAMES = ("dhtc", "dotc", "dltc", "octc", "ootc")
N_FEATURES = len(FEATURE_NAMES)
OCTC = FEATURE_NAMES.index("octc")


class FeatureError(ValueError):
    pass


class FeatureVector(NamedTuple):
    dhtc: float
    dotc: float
    dltc: float
    octc: float
    ootc: float


def compute_features(bar_t: OhlcBar, bar_prev: OhlcBar) -> FeatureVector:
    """The five daily return features of session t, using the previous close for the overnight pair."""
    if not bar_prev.date < bar_t.date:
        raise FeatureError(f"previous bar {bar_prev.date} does not precede {bar_t.date}")
    close, prev_close = bar_t.close, bar_prev.close
    if close <= 0 or prev_close <= 0:
        raise FeatureError(f"{bar_t.date}: non-positive close")
    return FeatureVector(
        dhtc=(bar_t.high - close) / close,
        dotc=(bar_t.open - close) / close,
        dltc=(bar_t.low - close) / close,
        octc=(close - prev_close) / prev_close,
        ootc=(bar_t.open - prev_close) / prev_close,
    )


@dataclass(frozen=True)
class FeatureMatrix:
    """
    Row t holds both markets' date-t features and the domestic close-to-close
    return realised on the next shared date.

    `inputs` is (n, 10): domestic block first, then foreign.
    """

    dates: Tuple[date, ...]
    domestic: np.ndarray
    foreign: np.ndarray
    target: np.ndarray
    domestic_id: str = "KO"
    foreign_id: str = "US"

    def __len__(self) -> int:
        return len(self.dates)

    @property
    def inputs(self) -> np.ndarray:
        return np.hstack([self.domestic, self.foreign])

    @property
    def column_names(self) -> List[str]:
        dom, fgn = self.domestic_id.lower(), self.foreign_id.lower()
        return [f"{dom}_{f}" for f in FEATURE_NAMES] + [f"{fgn}_{f}" for f in FEATURE_NAMES]

    def column(self, name: str) -> np.ndarray:
        if name == "target":
            return self.target
        names = self.column_names
        if name not in names:
            raise FeatureError(f"unknown column {name!r}")
        return self.inputs[:, names.index(name)]

    def rows(self, indices: Sequence[int]) -> "FeatureMatrix":
        idx = np.asarray(list(indices), dtype=int)
        return FeatureMatrix(
            dates=tuple(self.dates[i] for i in idx),
            domestic=self.domestic[idx].copy(),
            foreign=self.foreign[idx].copy(),
            target=self.target[idx].copy(),
            domestic_id=self.domestic_id,
            foreign_id=self.foreign_id,
        )

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.inputs, columns=self.column_names)
        frame.insert(0, "date", [d.isoformat() for d in self.dates])
        frame["target"] = self.target
        return frame


def _feature_block(bars: Sequence[OhlcBar]) -> np.ndarray:
    return np.array([compute_features(bars[i], bars[i - 1]) for i in range(1, len(bars))], dtype=np.float64)


def build_matrix(pair: AlignedPair) -> FeatureMatrix:
    """
    One row per shared date that has both a previous date (for the lagged
    close) and a next date (for the target): |dates| - 2 rows.
    Cross-market ratios are never formed.
    """
    n = len(pair.dates)
    if n < 3:
        raise FeatureError(f"need at least 3 aligned dates, got {n}")
    domestic = _feature_block(pair.domestic.bars)  # rows for dates[1:]
    foreign = _feature_block(pair.foreign.bars)
    target = domestic[1:, OCTC].copy()

    matrix = FeatureMatrix(
        dates=tuple(pair.dates[1:-1]),
        domestic=domestic[:-1],
        foreign=foreign[:-1],
        target=target,
        domestic_id=pair.domestic.market_id,
        foreign_id=pair.foreign.market_id,
    )
    if not np.all(np.isfinite(matrix.inputs)) or not np.all(np.isfinite(matrix.target)):
        raise FeatureError("non-finite feature values")
    logger.debug("Built %d feature rows for %s/%s", len(matrix), matrix.domestic_id, matrix.foreign_id)
    return matrix


def export_matrix(matrix: FeatureMatrix, path: str) -> str:
    matrix.to_frame().to_csv(path, index=False, float_format="%.17g")
    return path
