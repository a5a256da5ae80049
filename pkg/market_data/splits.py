from dataclasses import dataclass
from fractions import Fraction
from typing import Sized

from .bars import MarketDataError


@dataclass(frozen=True)
class DataSplit:
    """Three contiguous chronological index ranges: train, then validation, then test."""

    train: range
    validation: range
    test: range

    @property
    def n_rows(self) -> int:
        return len(self.train) + len(self.validation) + len(self.test)

    def sizes(self):
        return len(self.train), len(self.validation), len(self.test)


def _floor_fraction(frac: float, n: int) -> int:
    # Fraction(str()) keeps 0.7 * 70 at exactly 49 instead of 48.999...
    return int(Fraction(str(frac)) * n)


def chronological_split(rows: Sized, train_frac: float = 0.7, val_frac_of_train: float = 0.3) -> DataSplit:
    """
    Walk-forward split without shuffling. The test block is the chronological
    tail; validation is the tail of the remaining block.

    `rows` may be an AlignedPair, a FeatureMatrix or a plain row count.
    """
    n = rows if isinstance(rows, int) else len(rows)
    if not 0 < train_frac < 1 or not 0 < val_frac_of_train < 1:
        raise MarketDataError("split fractions must lie strictly between 0 and 1")
    if n < 10:
        raise MarketDataError(f"need at least 10 rows to split, got {n}")

    n_fit = _floor_fraction(train_frac, n)
    n_train = int((1 - Fraction(str(val_frac_of_train))) * n_fit)
    n_val = n_fit - n_train
    n_test = n - n_fit
    if min(n_train, n_val, n_test) < 1:
        raise MarketDataError(f"{n} rows leave an empty partition (train={n_train}, val={n_val}, test={n_test})")

    return DataSplit(
        train=range(0, n_train),
        validation=range(n_train, n_fit),
        test=range(n_fit, n),
    )
