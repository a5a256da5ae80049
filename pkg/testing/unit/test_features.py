"""
Unit Tests for Feature Construction and Scaling
"""

import unittest
import sys
import os
import tempfile
from datetime import date

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

import numpy as np
import pandas as pd
from hypothesis import given, settings, strategies as st

from features import (
    DEFAULT_RANGES,
    TARGET,
    FeatureError,
    build_matrix,
    compute_features,
    export_matrix,
    fit_scaler,
    inverse_transform,
    transform,
)
from market_data import MarketSeries, OhlcBar, align_calendars, business_days, chronological_split
from synthetic import SynthConfig, generate_coupled_markets


def walk(market_id, days, rng):
    closes = 100 * np.cumprod(1 + rng.normal(0, 0.01, len(days)))
    bars = []
    for d, c in zip(days, closes):
        o = c * (1 + rng.normal(0, 0.003))
        bars.append(OhlcBar(d, o, max(o, c) * 1.004, min(o, c) * 0.996, c))
    return MarketSeries(market_id, tuple(bars))


def small_pair(n=30, seed=0):
    rng = np.random.default_rng(seed)
    days = business_days(date(2006, 1, 2), n)
    return align_calendars(walk("KO", days, rng), walk("US", days, rng))


class TestComputeFeatures(unittest.TestCase):
    """Test the five daily return features"""

    def test_reference_session(self):
        """Test O=100 H=110 L=95 C=105 after a close of 100"""
        prev = OhlcBar(date(2006, 1, 2), 100.0, 100.0, 100.0, 100.0)
        bar = OhlcBar(date(2006, 1, 3), 100.0, 110.0, 95.0, 105.0)
        f = compute_features(bar, prev)
        self.assertAlmostEqual(f.dhtc, 0.0476, places=4)
        self.assertAlmostEqual(f.dotc, -0.0476, places=4)
        self.assertAlmostEqual(f.dltc, -0.0952, places=4)
        self.assertAlmostEqual(f.octc, 0.05)
        self.assertEqual(f.ootc, 0.0)

    def test_previous_bar_must_precede(self):
        bar = OhlcBar(date(2006, 1, 3), 100.0, 110.0, 95.0, 105.0)
        with self.assertRaises(FeatureError):
            compute_features(bar, bar)


class TestBuildMatrix(unittest.TestCase):
    """Test row construction over aligned dates"""

    def test_shape_and_dates(self):
        """Test that n dates give n-2 rows of ten features"""
        pair = small_pair(30)
        matrix = build_matrix(pair)
        self.assertEqual(len(matrix), 28)
        self.assertEqual(matrix.inputs.shape, (28, 10))
        self.assertEqual(matrix.dates, pair.dates[1:-1])
        self.assertEqual(matrix.column_names[0], "ko_dhtc")
        self.assertEqual(matrix.column_names[-1], "us_ootc")

    def test_target_is_next_domestic_return(self):
        """Test that row t's target is the close-to-close return of the next date"""
        pair = small_pair(30)
        matrix = build_matrix(pair)
        closes = pair.domestic.closes()
        expected = closes[2:] / closes[1:-1] - 1
        np.testing.assert_allclose(matrix.target, expected, rtol=1e-12)
        np.testing.assert_allclose(matrix.target[:-1], matrix.column("ko_octc")[1:])

    def test_last_bar_only_reaches_last_target(self):
        """Test that changing the final session leaves every input row untouched"""
        pair = small_pair(30)
        base = build_matrix(pair)
        bars = list(pair.domestic.bars)
        last = bars[-1]
        bars[-1] = OhlcBar(last.date, last.open, last.high * 1.5, last.low, last.high * 1.2)
        changed = build_matrix(align_calendars(MarketSeries("KO", tuple(bars)), pair.foreign))
        np.testing.assert_array_equal(base.inputs, changed.inputs)
        np.testing.assert_array_equal(base.target[:-1], changed.target[:-1])
        self.assertNotEqual(base.target[-1], changed.target[-1])

    def test_too_few_dates(self):
        with self.assertRaises(FeatureError):
            build_matrix(small_pair(2))

    def test_export_matrix(self):
        """Test the CSV layout of an exported matrix"""
        matrix = build_matrix(small_pair(12))
        with tempfile.TemporaryDirectory() as tmp:
            path = export_matrix(matrix, os.path.join(tmp, "m.csv"))
            frame = pd.read_csv(path)
        self.assertEqual(list(frame.columns), ["date"] + matrix.column_names + ["target"])
        self.assertEqual(len(frame), len(matrix))
        np.testing.assert_allclose(frame["target"].to_numpy(), matrix.target, rtol=1e-15)


class TestScaling(unittest.TestCase):
    """Test min-max scaling fitted on training rows"""

    def setUp(self):
        self.matrix = build_matrix(small_pair(60))
        self.split = chronological_split(self.matrix)

    def test_training_range_maps_to_output_range(self):
        """Test that training extremes land on the range end points"""
        for lo, hi in DEFAULT_RANGES:
            scaler = fit_scaler(self.matrix, self.split, (lo, hi))
            scaled = scaler.transform_matrix(self.matrix)
            train = np.asarray(self.split.train)
            np.testing.assert_allclose(scaled.inputs[train].min(axis=0), lo, atol=1e-12)
            np.testing.assert_allclose(scaled.inputs[train].max(axis=0), hi, atol=1e-12)
            self.assertAlmostEqual(scaled.target[train].min(), lo, places=12)
            self.assertAlmostEqual(scaled.target[train].max(), hi, places=12)

    def test_no_clipping_outside_training_range(self):
        scaler = fit_scaler(self.matrix, self.split)
        above = scaler.train_max[-1] + (scaler.train_max[-1] - scaler.train_min[-1])
        self.assertAlmostEqual(transform(scaler, above, TARGET), 3.0)

    def test_scaler_ignores_held_out_rows(self):
        """Test that perturbing validation and test rows leaves the scaler unchanged"""
        scaler = fit_scaler(self.matrix, self.split)
        held_out = np.r_[np.asarray(self.split.validation), np.asarray(self.split.test)]
        domestic, target = self.matrix.domestic.copy(), self.matrix.target.copy()
        domestic[held_out] *= 50.0
        target[held_out] = -target[held_out] * 10.0
        perturbed = type(self.matrix)(self.matrix.dates, domestic, self.matrix.foreign.copy(), target)
        other = fit_scaler(perturbed, self.split)
        np.testing.assert_array_equal(scaler.train_min, other.train_min)
        np.testing.assert_array_equal(scaler.train_max, other.train_max)

    def test_constant_column_rejected(self):
        domestic = self.matrix.domestic.copy()
        domestic[:, 0] = 0.01
        constant = type(self.matrix)(self.matrix.dates, domestic, self.matrix.foreign, self.matrix.target)
        with self.assertRaisesRegex(FeatureError, "ko_dhtc"):
            fit_scaler(constant, self.split)

    def test_invalid_range_rejected(self):
        with self.assertRaises(FeatureError):
            fit_scaler(self.matrix, self.split, (1.0, -1.0))

    def test_unknown_column(self):
        scaler = fit_scaler(self.matrix, self.split)
        with self.assertRaises(FeatureError):
            scaler.transform(0.0, "jp_octc")

    def test_round_trip_on_many_values(self):
        """Test inverse(transform(x)) == x for 1e5 returns and every output range"""
        rng = np.random.default_rng(5)
        x = rng.normal(0, 0.02, 100_000)
        for feature_range in DEFAULT_RANGES:
            scaler = fit_scaler(self.matrix, self.split, feature_range)
            spread = scaler.train_max[-1] - scaler.train_min[-1]
            back = inverse_transform(scaler, transform(scaler, x, TARGET), TARGET)
            err = np.abs(back - x) / np.maximum(np.abs(x), spread)
            self.assertLessEqual(err.max(), 1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(min_value=-0.5, max_value=0.5, allow_nan=False), st.sampled_from(DEFAULT_RANGES))
    def test_round_trip_property(self, value, feature_range):
        scaler = fit_scaler(self.matrix, self.split, feature_range)
        back = scaler.inverse_transform(scaler.transform(value, "us_octc"), "us_octc")
        self.assertAlmostEqual(back, value, places=12)


class TestSyntheticMatrix(unittest.TestCase):
    """Test that the feature pipeline recovers the generated returns"""

    def test_target_matches_generated_returns(self):
        markets = generate_coupled_markets(SynthConfig(n_days=200, seed=3))
        matrix = build_matrix(markets.pair)
        np.testing.assert_allclose(matrix.target, markets.next_returns[1:], rtol=1e-9, atol=1e-12)


if __name__ == '__main__':
    unittest.main()
