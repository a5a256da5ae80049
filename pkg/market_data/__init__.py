"""Market data package: CSV ingestion, calendar alignment, chronological splits."""

from .bars import (
    CSV_HEADER,
    AlignedPair,
    MarketDataError,
    MarketSeries,
    OhlcBar,
    align_calendars,
    business_days,
    parse_csv,
    write_csv,
)
from .splits import DataSplit, chronological_split

__all__ = [
    'CSV_HEADER',
    'AlignedPair',
    'MarketDataError',
    'MarketSeries',
    'OhlcBar',
    'align_calendars',
    'business_days',
    'parse_csv',
    'write_csv',
    'DataSplit',
    'chronological_split',
]
