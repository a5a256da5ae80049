"""
Unit Tests for Training and Early Stopping
"""

import unittest
import sys
import os
import math

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

import numpy as np
from hypothesis import given, settings, strategies as st

from algorithms.fusion import ModelSpec, build_model
from algorithms.training import (
    EarlyStopping,
    TrainConfig,
    TrainingError,
    evaluate_validation,
    simulate_early_stopping,
    train,
)
from features import ScaledData, build_matrix, fit_scaler
from market_data import chronological_split
from synthetic import SynthConfig, generate_coupled_markets


def scaled_synthetic(n_days=200, seed=0):
    matrix = build_matrix(generate_coupled_markets(SynthConfig(n_days=n_days, seed=seed)).pair)
    split = chronological_split(matrix)
    return fit_scaler(matrix, split).transform_matrix(matrix), split


def reference_stop(losses, patience, max_epochs):
    """Epochs since the best loss reach `patience` -> stop; ties do not improve."""
    best_epoch, best = 0, math.inf
    last = min(len(losses), max_epochs)
    for epoch in range(1, last + 1):
        loss = losses[epoch - 1]
        if loss < best:
            best, best_epoch = loss, epoch
        if epoch - best_epoch >= patience:
            return best_epoch, epoch
    return best_epoch, last


class TestEarlyStopping(unittest.TestCase):
    """Test the patience rule on scripted validation losses"""

    def test_rising_after_second_epoch(self):
        """Test a minimum at epoch 2 stopping at epoch 12"""
        losses = [5.0, 4.0] + [4.1 + 0.1 * k for k in range(98)]
        self.assertEqual(simulate_early_stopping(losses, 10, 100), (2, 12))

    def test_strictly_decreasing_runs_to_the_cap(self):
        losses = [100.0 - k for k in range(100)]
        self.assertEqual(simulate_early_stopping(losses, 10, 100), (100, 100))

    def test_counter_resets_on_improvement(self):
        """Test that a late improvement after a flat stretch restarts the patience window"""
        losses = [5.0] + [4.5] * 9 + [4.0] + [4.6] * 89
        self.assertEqual(simulate_early_stopping(losses, 10, 100), (11, 21))

    def test_ties_do_not_improve(self):
        losses = [1.0] * 20
        self.assertEqual(simulate_early_stopping(losses, 3, 20), (1, 4))

    def test_update_reports_improvement(self):
        stopper = EarlyStopping(2)
        self.assertTrue(stopper.update(1, 1.0))
        self.assertFalse(stopper.update(2, 1.0))
        self.assertFalse(stopper.should_stop)
        self.assertFalse(stopper.update(3, 2.0))
        self.assertTrue(stopper.should_stop)

    @settings(max_examples=1000, deadline=None)
    @given(
        st.lists(st.floats(min_value=0.0, max_value=10.0, allow_nan=False), min_size=1, max_size=60),
        st.integers(min_value=1, max_value=15),
        st.integers(min_value=2, max_value=60),
    )
    def test_matches_reference_rule(self, losses, patience, max_epochs):
        """Test stop/best epochs against an independent rendering of the rule"""
        best, stopped = simulate_early_stopping(losses, patience, max_epochs)
        self.assertEqual((best, stopped), reference_stop(losses, patience, max_epochs))
        self.assertLessEqual(1, best)
        self.assertLessEqual(best, stopped)
        self.assertLessEqual(stopped, max_epochs)
        if stopped < min(len(losses), max_epochs):
            self.assertEqual(stopped - best, patience)


class TestTrainConfig(unittest.TestCase):
    def test_patience_must_be_below_max_epochs(self):
        with self.assertRaises(TrainingError):
            TrainConfig(max_epochs=10, patience=10)

    def test_unknown_optimizer(self):
        with self.assertRaises(TrainingError):
            TrainConfig(optimizer="adagrad")

    def test_non_positive_batch(self):
        with self.assertRaises(TrainingError):
            TrainConfig(batch_size=0)


class TestTrainLoop(unittest.TestCase):
    """Test mini-batch training on a small synthetic window"""

    @classmethod
    def setUpClass(cls):
        cls.data, cls.split = scaled_synthetic()

    def fit(self, variant="early_fusion", seed=0, **overrides):
        spec = ModelSpec(variant, hidden_units=4)
        model = build_model(spec, np.random.default_rng(seed))
        cfg = TrainConfig(**{"batch_size": 16, "max_epochs": 15, "patience": 4, "seed": seed, **overrides})
        return train(model, self.data, self.split, cfg)

    def test_log_invariants(self):
        model, log = self.fit()
        self.assertLessEqual(1, log.best_epoch)
        self.assertLessEqual(log.best_epoch, log.stopped_epoch)
        self.assertLessEqual(log.stopped_epoch, 15)
        self.assertEqual(len(log.train_loss), log.stopped_epoch)
        self.assertEqual(len(log.rows()), log.stopped_epoch)
        self.assertEqual(log.best_val_loss, min(log.val_loss))

    def test_loop_follows_the_stopping_rule(self):
        """Test that reported epochs equal the rule applied to the recorded losses"""
        _, log = self.fit(optimizer="sgd", learning_rate=0.01)
        self.assertEqual(simulate_early_stopping(log.val_loss, 4, 15), (log.best_epoch, log.stopped_epoch))

    def test_best_weights_restored(self):
        """Test that the returned model reproduces the best validation loss exactly"""
        model, log = self.fit(optimizer="rmsprop")
        self.assertEqual(evaluate_validation(model, self.data, self.split), log.best_val_loss)

    def test_same_seed_same_log(self):
        model_a, log_a = self.fit(seed=5)
        model_b, log_b = self.fit(seed=5)
        self.assertEqual(log_a.train_loss, log_b.train_loss)
        self.assertEqual(log_a.val_loss, log_b.val_loss)
        for a, b in zip(model_a.parameters(), model_b.parameters()):
            np.testing.assert_array_equal(a, b)

    def test_every_architecture_trains(self):
        for variant in ("single_modal", "intermediate_fusion"):
            _, log = self.fit(variant)
            self.assertTrue(all(np.isfinite(log.val_loss)))

    def test_late_fusion_trains_branches_separately(self):
        """Test one log per branch and a single summary epoch for the combination"""
        model, log = self.fit("late_fusion")
        self.assertEqual(set(log.branch_logs), {"domestic", "foreign"})
        self.assertEqual((log.best_epoch, log.stopped_epoch), (1, 1))
        self.assertEqual(log.val_loss[0], evaluate_validation(model, self.data, self.split))
        for branch_log in log.branch_logs.values():
            self.assertGreaterEqual(branch_log.stopped_epoch, branch_log.best_epoch)

    def test_single_row_tail_batch(self):
        """Test that a one-row tail batch is merged so batch norm can run"""
        data, split = scaled_synthetic(n_days=71)
        self.assertEqual(len(split.train), 33)
        model = build_model(ModelSpec("early_fusion", hidden_units=4), np.random.default_rng(0))
        _, log = train(model, data, split, TrainConfig(batch_size=32, max_epochs=3, patience=2))
        self.assertGreaterEqual(log.stopped_epoch, 1)

    def test_non_finite_loss_reports_epoch_and_batch(self):
        inputs = self.data.inputs.copy()
        inputs[0, 0] = np.nan
        bad = ScaledData(inputs, self.data.target, self.data.scaler)
        model = build_model(ModelSpec("early_fusion", hidden_units=4), np.random.default_rng(0))
        with self.assertRaisesRegex(TrainingError, "non-finite loss at epoch 1, batch"):
            train(model, bad, self.split, TrainConfig(batch_size=16, max_epochs=5, patience=2))

    def test_perfect_predictor_has_zero_validation_error(self):
        model = build_model(ModelSpec("early_fusion", hidden_units=4), np.random.default_rng(0))
        exact = ScaledData(self.data.inputs, model.predict(self.data.inputs), self.data.scaler)
        self.assertLess(evaluate_validation(model, exact, self.split), 1e-20)

    def test_split_must_cover_data(self):
        model = build_model(ModelSpec("early_fusion", hidden_units=4), np.random.default_rng(0))
        with self.assertRaises(TrainingError):
            train(model, self.data, chronological_split(len(self.data) - 1), TrainConfig(max_epochs=3, patience=2))


if __name__ == '__main__':
    unittest.main()
