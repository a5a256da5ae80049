"""
Unit Tests for Market Data
Tests CSV ingestion, bar invariants, calendar alignment and chronological splits
"""

import unittest
import sys
import os
import tempfile
from datetime import date

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from hypothesis import given, settings, strategies as st

from market_data import (
    AlignedPair,
    MarketDataError,
    MarketSeries,
    OhlcBar,
    align_calendars,
    business_days,
    chronological_split,
    parse_csv,
    write_csv,
)

HEADER = "Date,Open,High,Low,Close,AdjClose,Volume\n"


def make_bar(day, close=100.0):
    return OhlcBar(day, close, close * 1.01, close * 0.99, close)


class CsvTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, body, name="prices.csv"):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(HEADER + body)
        return path


class TestParseCsv(CsvTestCase):
    """Test reading daily OHLC files"""

    def test_adjusted_close_becomes_close(self):
        """Test that AdjClose is the bar's close and O/H/L keep their order"""
        path = self.write("2006-01-03,100,110,95,106,105,1000\n")
        series = parse_csv(path, "KO")
        self.assertEqual(len(series), 1)
        bar = series.bars[0]
        self.assertEqual(bar.close, 105.0)
        self.assertEqual(bar.date, date(2006, 1, 3))
        self.assertLessEqual(bar.low, min(bar.open, bar.close))
        self.assertGreaterEqual(bar.high, max(bar.open, bar.close))
        self.assertAlmostEqual(bar.open, 100 * 105 / 106)

    def test_unadjusted_ohlc_kept_when_disabled(self):
        """Test that adjust_ohlc=False keeps raw open/high/low"""
        path = self.write("2006-01-03,100,110,95,106,106,1000\n")
        bar = parse_csv(path, "KO", adjust_ohlc=False).bars[0]
        self.assertEqual((bar.open, bar.high, bar.low, bar.close), (100.0, 110.0, 95.0, 106.0))

    def test_malformed_number_names_line(self):
        """Test that an unparseable price reports the line"""
        path = self.write("2006-01-03,100,110,95,106,105,1000\n2006-01-04,abc,110,95,106,105,1000\n")
        with self.assertRaises(MarketDataError) as ctx:
            parse_csv(path, "KO")
        self.assertIn("line 3", str(ctx.exception))

    def test_line_numbers_count_blank_lines(self):
        path = self.write("2006-01-03,100,110,95,106,105,1000\n\n2006-01-04,100,110,95,abc,105,1000\n")
        with self.assertRaisesRegex(MarketDataError, "line 4: cannot parse Close"):
            parse_csv(path, "KO")

    def test_blank_lines_ignored(self):
        path = self.write("2006-01-03,100,110,95,106,106,1000\n\n2006-01-04,100,110,95,107,107,1000\n")
        self.assertEqual(len(parse_csv(path, "KO")), 2)

    def test_bad_date_names_line(self):
        """Test that a bad date reports the line"""
        path = self.write("2006-13-03,100,110,95,106,105,1000\n")
        with self.assertRaisesRegex(MarketDataError, "line 2: bad date"):
            parse_csv(path, "KO")

    def test_missing_fields_skipped(self):
        """Test that rows with empty or null fields are dropped"""
        path = self.write(
            "2006-01-03,100,110,95,106,106,1000\n"
            "2006-01-04,,110,95,106,106,1000\n"
            "2006-01-05,null,null,null,null,null,null\n"
            "2006-01-06,101,111,96,107,107,1000\n"
        )
        series = parse_csv(path, "KO")
        self.assertEqual(series.dates, (date(2006, 1, 3), date(2006, 1, 6)))

    def test_wrong_header_rejected(self):
        """Test that a header other than the OHLC layout is refused"""
        path = os.path.join(self.tmp.name, "bad.csv")
        with open(path, "w", encoding="utf-8") as f:
            f.write("Date,Close\n2006-01-03,100\n")
        with self.assertRaisesRegex(MarketDataError, "header"):
            parse_csv(path, "KO")

    def test_ordering_violation_rejected(self):
        """Test that high below close is an error"""
        path = self.write("2006-01-03,100,101,95,106,106,1000\n")
        with self.assertRaisesRegex(MarketDataError, "OHLC ordering violated"):
            parse_csv(path, "KO")

    def test_duplicate_date_rejected(self):
        """Test that a repeated date is an error"""
        path = self.write("2006-01-03,100,110,95,106,106,1000\n2006-01-03,100,110,95,106,106,1000\n")
        with self.assertRaisesRegex(MarketDataError, "duplicate date"):
            parse_csv(path, "KO")

    def test_write_then_parse_is_exact(self):
        """Test that written series are read back bit for bit"""
        days = business_days(date(2010, 1, 4), 5)
        series = MarketSeries("US", tuple(make_bar(d, 100.0 + i / 3) for i, d in enumerate(days)))
        path = write_csv(series, os.path.join(self.tmp.name, "US.csv"))
        self.assertEqual(parse_csv(path, "US"), series)


class TestBars(unittest.TestCase):
    """Test bar and series invariants"""

    def test_non_positive_price_rejected(self):
        with self.assertRaises(MarketDataError):
            OhlcBar(date(2006, 1, 3), 0.0, 1.0, 0.0, 1.0)

    def test_close_outside_range_rejected(self):
        with self.assertRaises(MarketDataError):
            OhlcBar(date(2006, 1, 3), 100.0, 101.0, 99.0, 102.0)

    def test_dates_must_increase(self):
        bars = (make_bar(date(2006, 1, 4)), make_bar(date(2006, 1, 3)))
        with self.assertRaisesRegex(MarketDataError, "not increasing"):
            MarketSeries("KO", bars)


class TestAlignment(unittest.TestCase):
    """Test calendar alignment on shared dates"""

    def test_holiday_dropped(self):
        """Test that a date missing in one market disappears from both"""
        days = business_days(date(2006, 1, 2), 5)
        ko = MarketSeries("KO", tuple(make_bar(d) for d in days))
        us = MarketSeries("US", tuple(make_bar(d) for d in days if d != days[2]))
        pair = align_calendars(ko, us)
        self.assertEqual(len(pair), 4)
        self.assertNotIn(days[2], pair.dates)
        self.assertEqual(pair.domestic.dates, pair.foreign.dates)

    def test_disjoint_calendars_rejected(self):
        ko = MarketSeries("KO", (make_bar(date(2006, 1, 2)),))
        us = MarketSeries("US", (make_bar(date(2006, 1, 3)),))
        with self.assertRaises(MarketDataError):
            align_calendars(ko, us)

    def test_empty_series_rejected(self):
        with self.assertRaises(MarketDataError):
            align_calendars(MarketSeries("KO", ()), MarketSeries("US", (make_bar(date(2006, 1, 2)),)))

    def test_window_is_inclusive(self):
        days = business_days(date(2006, 1, 2), 10)
        series = MarketSeries("KO", tuple(make_bar(d) for d in days))
        pair = align_calendars(series, MarketSeries("US", series.bars))
        sub = pair.window(days[2], days[5])
        self.assertIsInstance(sub, AlignedPair)
        self.assertEqual(sub.dates, tuple(days[2:6]))

    @settings(max_examples=50, deadline=None)
    @given(st.sets(st.integers(0, 59), min_size=1), st.sets(st.integers(0, 59), min_size=1))
    def test_alignment_is_intersection(self, a, b):
        """Test that aligned dates are exactly the shared sessions, in order"""
        days = business_days(date(2006, 1, 2), 60)
        ko = MarketSeries("KO", tuple(make_bar(days[i]) for i in sorted(a)))
        us = MarketSeries("US", tuple(make_bar(days[i]) for i in sorted(b)))
        shared = sorted(a & b)
        if not shared:
            with self.assertRaises(MarketDataError):
                align_calendars(ko, us)
            return
        pair = align_calendars(ko, us)
        self.assertEqual(pair.dates, tuple(days[i] for i in shared))


class TestChronologicalSplit(unittest.TestCase):
    """Test walk-forward partitions"""

    def test_hundred_rows(self):
        """Test the 49/21/30 split of 100 rows"""
        split = chronological_split(100)
        self.assertEqual(split.train, range(0, 49))
        self.assertEqual(split.validation, range(49, 70))
        self.assertEqual(split.test, range(70, 100))

    def test_ten_rows(self):
        """Test the smallest accepted input"""
        self.assertEqual(chronological_split(10).sizes(), (4, 3, 3))

    def test_too_few_rows(self):
        with self.assertRaises(MarketDataError):
            chronological_split(9)

    def test_bad_fractions(self):
        with self.assertRaises(MarketDataError):
            chronological_split(100, train_frac=1.0)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(min_value=10, max_value=20000))
    def test_partitions_are_contiguous_and_ordered(self, n):
        """Test that the three blocks tile 0..n-1 in order"""
        split = chronological_split(n)
        self.assertEqual(split.train.start, 0)
        self.assertEqual(split.train.stop, split.validation.start)
        self.assertEqual(split.validation.stop, split.test.start)
        self.assertEqual(split.test.stop, n)
        self.assertEqual(split.n_rows, n)
        self.assertGreaterEqual(min(split.sizes()), 1)


if __name__ == '__main__':
    unittest.main()
