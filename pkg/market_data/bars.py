import csv
import logging
import math
from dataclasses import dataclass
from datetime import date
from typing import Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

CSV_HEADER = ["Date", "Open", "High", "Low", "Close", "AdjClose", "Volume"]
_MISSING_TOKENS = {"", "null", "nan", "na", "n/a"}


class MarketDataError(ValueError):
    """Raised for malformed input files and violated bar/series invariants."""


@dataclass(frozen=True)
class OhlcBar:
    """One trading session. `close` is the adjusted close."""

    date: date
    open: float
    high: float
    low: float
    close: float
    volume: float = 0.0

    def __post_init__(self):
        prices = (self.open, self.high, self.low, self.close)
        if not all(math.isfinite(p) and p > 0 for p in prices):
            raise MarketDataError(f"{self.date}: prices must be finite and strictly positive")
        if not (self.low <= self.open <= self.high and self.low <= self.close <= self.high):
            raise MarketDataError(
                f"{self.date}: OHLC ordering violated "
                f"(open={self.open}, high={self.high}, low={self.low}, close={self.close})"
            )
        if not self.volume >= 0:
            raise MarketDataError(f"{self.date}: negative volume {self.volume}")


@dataclass(frozen=True)
class MarketSeries:
    market_id: str
    bars: Tuple[OhlcBar, ...]

    def __post_init__(self):
        object.__setattr__(self, "bars", tuple(self.bars))
        for prev, cur in zip(self.bars, self.bars[1:]):
            if cur.date == prev.date:
                raise MarketDataError(f"{self.market_id}: duplicate date {cur.date}")
            if cur.date < prev.date:
                raise MarketDataError(f"{self.market_id}: dates not increasing at {cur.date}")

    def __len__(self) -> int:
        return len(self.bars)

    @property
    def dates(self) -> Tuple[date, ...]:
        return tuple(bar.date for bar in self.bars)

    def closes(self) -> np.ndarray:
        return np.array([bar.close for bar in self.bars], dtype=np.float64)

    def restrict(self, keep: Iterable[date]) -> "MarketSeries":
        keep = set(keep)
        return MarketSeries(self.market_id, tuple(b for b in self.bars if b.date in keep))

    def between(self, start: date, end: date) -> "MarketSeries":
        return MarketSeries(self.market_id, tuple(b for b in self.bars if start <= b.date <= end))


@dataclass(frozen=True)
class AlignedPair:
    domestic: MarketSeries
    foreign: MarketSeries
    dates: Tuple[date, ...]

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        if self.domestic.dates != self.dates or self.foreign.dates != self.dates:
            raise MarketDataError("aligned series must carry exactly the shared dates")

    def __len__(self) -> int:
        return len(self.dates)

    def window(self, start: date, end: date) -> "AlignedPair":
        """Restrict both markets to start <= date <= end (inclusive)."""
        domestic = self.domestic.between(start, end)
        return AlignedPair(domestic, self.foreign.between(start, end), domestic.dates)


def _parse_float(text: str, line_no: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise MarketDataError(f"line {line_no}: cannot parse {column}={text!r}") from None


def parse_csv(path: str, market_id: str, adjust_ohlc: bool = True) -> MarketSeries:
    """
    Read a daily OHLC file with header Date,Open,High,Low,Close,AdjClose,Volume.

    AdjClose becomes the bar's close. When it differs from the raw close and
    `adjust_ohlc` is set, open/high/low are scaled by AdjClose/Close so the
    bar keeps its session ordering. Rows with an empty (or "null") numeric
    field are skipped with a warning; anything else unparseable is an error
    that names the line.
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=False, skip_blank_lines=False)
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise MarketDataError(f"{path}: unreadable CSV ({e})") from e

    if list(frame.columns) != CSV_HEADER:
        raise MarketDataError(f"{path}: header must be {','.join(CSV_HEADER)}, got {','.join(frame.columns)}")

    bars: List[OhlcBar] = []
    skipped = 0
    for offset, row in enumerate(frame.itertuples(index=False, name=None)):
        line_no = offset + 2  # header is line 1
        fields = [str(v).strip() for v in row]
        if all(f == "" or f.lower() == "nan" for f in fields):
            continue
        if any(f.lower() in _MISSING_TOKENS for f in fields[1:]):
            skipped += 1
            logger.warning("%s line %d: missing numeric field, row skipped", market_id, line_no)
            continue
        try:
            day = date.fromisoformat(fields[0])
        except ValueError:
            raise MarketDataError(f"line {line_no}: bad date {fields[0]!r}") from None

        o, h, l, raw_close, adj_close, volume = (
            _parse_float(text, line_no, col) for text, col in zip(fields[1:], CSV_HEADER[1:])
        )
        # The raw session must be consistent before the adjustment factor is applied.
        if min(o, h, l, raw_close, adj_close) <= 0:
            raise MarketDataError(f"{day}: prices must be strictly positive (line {line_no})")
        if not (l <= o <= h and l <= raw_close <= h):
            raise MarketDataError(f"{day}: OHLC ordering violated (line {line_no})")

        if adjust_ohlc and adj_close != raw_close:
            factor = adj_close / raw_close
            o, h, l = o * factor, h * factor, l * factor
            # rounding can push the adjusted close a hair outside [l, h]
            h = max(h, adj_close, o)
            l = min(l, adj_close, o)
        bars.append(OhlcBar(day, o, h, l, adj_close, volume))

    if skipped:
        logger.info("%s: %d incomplete rows skipped", market_id, skipped)
    series = MarketSeries(market_id, tuple(bars))
    logger.info("Loaded %s: %d bars from %s", market_id, len(series), path)
    return series


def write_csv(series: MarketSeries, path: str) -> str:
    """Serialize in the format parse_csv reads. Floats use repr, so values round-trip exactly."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for bar in series.bars:
            writer.writerow([
                bar.date.isoformat(), repr(bar.open), repr(bar.high), repr(bar.low),
                repr(bar.close), repr(bar.close), repr(bar.volume),
            ])
    logger.info("Wrote %d %s bars to %s", len(series), series.market_id, path)
    return path


def align_calendars(a: MarketSeries, b: MarketSeries) -> AlignedPair:
    """
    Keep only dates on which both markets traded. `a` is the domestic market:
    row d pairs both markets' date-d sessions.
    """
    if not a.bars or not b.bars:
        raise MarketDataError("cannot align an empty series")
    shared = sorted(set(a.dates) & set(b.dates))
    if not shared:
        raise MarketDataError(f"{a.market_id} and {b.market_id} share no trading dates")
    dropped = len(a) + len(b) - 2 * len(shared)
    if dropped:
        logger.debug("Calendar alignment dropped %d single-market sessions", dropped)
    return AlignedPair(a.restrict(shared), b.restrict(shared), tuple(shared))


def business_days(start: date, count: int) -> Sequence[date]:
    return [ts.date() for ts in pd.bdate_range(start=start, periods=count)]
