"""
Unit tests for Coherence Service
"""
import math
import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from src.core.errors import InvalidParameter
from src.services.coherence_service import CoherenceService, summarize, window_flags

C0_INITIAL = 5 / 8 * math.log2(5) + 3 / 8 * math.log2(3) - 2


class TestWindowFlags(unittest.TestCase):
    """Test sign flags against a reference value"""

    def test_flags(self):
        """Test above, below and equal values"""
        self.assertEqual(window_flags([0.2, 0.1, 0.05, 0.1 + 1e-14], 0.1), [1, 0, -1, 0])


class TestCoherenceService(unittest.TestCase):
    """Test theta sweeps"""

    def setUp(self):
        self.service = CoherenceService()
        self.t_grid = np.linspace(0, math.pi, 11)

    def test_initial_values(self):
        """Test t = 0 has flag 0 and C0 = 0.045566"""
        series = self.service.run_theta(20, 0.4, self.t_grid)
        self.assertAlmostEqual(series.metadata['initial']['C0'], C0_INITIAL, places=10)
        self.assertAlmostEqual(series.f0[0], 1.0, places=10)
        for name in ('C0', 'C1', 'E01'):
            self.assertEqual(series.window_flags[name][0], 0)
            self.assertEqual(len(series.window_flags[name]), len(self.t_grid))

    def test_sweep_keeps_input_order(self):
        """Test results follow the theta list with or without threads"""
        thetas = [1.2, 0.0, 0.6]
        serial = self.service.coherence_sweep(12, thetas, self.t_grid)
        threaded = CoherenceService(workers=3).coherence_sweep(12, thetas, self.t_grid)
        self.assertEqual([s.metadata['state']['theta'] for s in serial], thetas)
        for a, b in zip(serial, threaded):
            np.testing.assert_array_equal(a.c0, b.c0)

    def test_small_bath_rejected(self):
        """Test InvalidParameter for N < 3"""
        with self.assertRaises(InvalidParameter):
            self.service.coherence_sweep(2, [0.1], self.t_grid)
        with self.assertRaises(InvalidParameter):
            self.service.coherence_sweep(True, [0.1], self.t_grid)

    def test_enhancement_at_theta_zero(self):
        """Test C0 rises above its initial value for a large bath at theta = 0"""
        summary = summarize(self.service.run_theta(200, 0.0, self.t_grid))
        self.assertTrue(summary.coherence_enhanced)
        self.assertGreater(summary.c0_peak, 0.15)
        self.assertEqual(summary.theta, 0.0)

    def test_summarize_sweep(self):
        """Test one summary row per theta"""
        sweep = self.service.coherence_sweep(5, [0.0, 0.5], self.t_grid)
        rows = self.service.summarize_sweep(sweep)
        self.assertEqual([row['theta'] for row in rows], [0.0, 0.5])
        self.assertIn('coherence_enhanced', rows[0])


if __name__ == '__main__':
    unittest.main()
