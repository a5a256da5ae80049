"""
Logic Tests for Leak-Free Model Selection
Perturbing the test block must not change anything decided before the final evaluation
"""

import unittest
import sys
import os

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

import numpy as np

from algorithms.tpe import TpeConfig
from experiments import CellTask, ExperimentConfig, run_cell
from features import FeatureMatrix, build_matrix, fit_scaler
from market_data import chronological_split
from synthetic import SynthConfig, generate_coupled_markets


def small_config():
    return ExperimentConfig(
        synthetic=SynthConfig(n_days=300, seed=1),
        tpe=TpeConfig(max_trials=4, n_startup=2),
        patience=2,
        max_epochs=6,
        space_overrides=(("hidden_units", (2, 4)), ("batch_size", (32,))),
    )


def perturb_test_rows(matrix, split, seed=0):
    rng = np.random.default_rng(seed)
    test = np.asarray(split.test)
    domestic, foreign, target = matrix.domestic.copy(), matrix.foreign.copy(), matrix.target.copy()
    domestic[test] += rng.normal(0, 0.05, domestic[test].shape)
    foreign[test] *= -3.0
    target[test] = rng.normal(0, 0.1, test.size)
    return FeatureMatrix(matrix.dates, domestic, foreign, target, matrix.domestic_id, matrix.foreign_id)


class TestLeakFreedom(unittest.TestCase):
    """Test that the held-out block never reaches scaling, search or training"""

    @classmethod
    def setUpClass(cls):
        cls.cfg = small_config()
        cls.matrix = build_matrix(generate_coupled_markets(cls.cfg.synthetic).pair)
        cls.split = chronological_split(cls.matrix)
        cls.perturbed = perturb_test_rows(cls.matrix, cls.split)

    def task(self, matrix, variant):
        return CellTask("US", "full", (-1.0, 1.0), variant, matrix, self.split, self.cfg, seed=17)

    def test_scaler_unchanged(self):
        a = fit_scaler(self.matrix, self.split)
        b = fit_scaler(self.perturbed, self.split)
        np.testing.assert_array_equal(a.train_min, b.train_min)
        np.testing.assert_array_equal(a.train_max, b.train_max)

    def test_search_and_training_unchanged(self):
        """Test identical trial histories, chosen configs and epoch logs under test-block perturbation"""
        for variant in ("early_fusion", "late_fusion"):
            original = run_cell(self.task(self.matrix, variant))
            shifted = run_cell(self.task(self.perturbed, variant))
            self.assertEqual(original.status, "ok", original.error)
            self.assertEqual(shifted.status, "ok", shifted.error)
            self.assertEqual(original.trials, shifted.trials)
            self.assertEqual(original.best_config, shifted.best_config)
            self.assertEqual(original.best_val_mse, shifted.best_val_mse)
            self.assertEqual(original.epoch_log.val_loss, shifted.epoch_log.val_loss)
            self.assertEqual(original.epoch_log.best_epoch, shifted.epoch_log.best_epoch)
            self.assertEqual(original.n_test, len(self.split.test))

    def test_test_block_does_reach_the_score(self):
        original = run_cell(self.task(self.matrix, "domestic_only"))
        shifted = run_cell(self.task(self.perturbed, "domestic_only"))
        self.assertNotEqual(original.mse, shifted.mse)


if __name__ == '__main__':
    unittest.main()
