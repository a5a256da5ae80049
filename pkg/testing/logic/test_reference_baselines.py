"""
Logic Tests for the Rule Baselines on Real Index Data
Runs only when FUSION_KO_CSV and FUSION_SP_CSV point to daily OHLC files covering 2006-2017
"""

import unittest
import sys
import os
from datetime import date

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from evaluation import rule_baselines
from features import build_matrix
from market_data import align_calendars, parse_csv

KO_CSV = os.environ.get("FUSION_KO_CSV", "")
SP_CSV = os.environ.get("FUSION_SP_CSV", "")

# KOSPI against S&P 500, 2006-2017
REFERENCE = {"momentum_domestic": 0.484, "momentum_foreign": 0.562, "buy_hold": 0.549}


@unittest.skipUnless(os.path.isfile(KO_CSV) and os.path.isfile(SP_CSV), "set FUSION_KO_CSV and FUSION_SP_CSV")
class TestReferenceBaselines(unittest.TestCase):
    """Test the three rules against published hit ratios on the full 2006-2017 window"""

    def test_full_window(self):
        pair = align_calendars(parse_csv(KO_CSV, "KO"), parse_csv(SP_CSV, "SP"))
        matrix = build_matrix(pair.window(date(2006, 1, 1), date(2017, 12, 31)))
        reports = rule_baselines(matrix, range(len(matrix)))
        for name, expected in REFERENCE.items():
            with self.subTest(baseline=name):
                self.assertAlmostEqual(reports[name].hit_ratio, expected, delta=0.02)


if __name__ == '__main__':
    unittest.main()
