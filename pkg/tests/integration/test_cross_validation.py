"""
Integration tests for the simulator
Exact, collective and closed-form results checked against each other end to end
"""
import math
import sys
import time
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from src.core import collective, ed
from src.core.analytic import (
    FIDELITY_FORMS,
    eval_coherence_closed,
    eval_fidelity_closed,
    eval_rho01_theta,
    eval_rho2_theta,
)
from src.core.measures import fidelity
from src.core.orchestrator import SimulationOrchestrator
from src.models.state_spec import InitialStateSpec, StateFamily
from src.services.verification_service import DIAGONAL_ELEMENTS, VerificationService

C0_INITIAL = 5 / 8 * math.log2(5) + 3 / 8 * math.log2(3) - 2


class TestEngineAgreement(unittest.TestCase):
    """Collective engine against the exact oracle"""

    def test_all_families_small_baths(self):
        """Test every reduced matrix agrees for N = 2..6"""
        t_grid = np.linspace(0, 2 * math.pi, 13)
        for n in range(2, 7):
            specs = [InitialStateSpec(f, n) for f in StateFamily if f is not StateFamily.THETA_FAMILY]
            specs += [InitialStateSpec(StateFamily.THETA_FAMILY, n, theta) for theta in (0.0, 0.7, math.pi / 2)]
            for spec in specs:
                exact = ed.evolve_and_reduce(spec, t_grid)
                fast = collective.evolve_and_reduce(spec, t_grid)
                worst = max(a.distance(b) for a, b in zip(exact, fast))
                self.assertLess(worst, 1e-10, f"{spec.label}: {worst:.3e}")

    def test_tables_at_time_zero(self):
        """Test the matrix-element tables match the oracle at t = 0"""
        for n in (4, 7):
            record = ed.evolve_and_reduce(InitialStateSpec("theta", n, 0.7), [0.0])[0]
            np.testing.assert_allclose(eval_rho01_theta(0.7, n, 0.0), record.rho_01, atol=1e-12)
            np.testing.assert_allclose(eval_rho2_theta(0.7, n, 0.0), record.rho_2, atol=1e-12)


class TestFullSweep(unittest.TestCase):
    """Exact oracle against the collective engine and the closed forms for N = 3..10 on 50 samples"""

    @classmethod
    def setUpClass(cls):
        cls.t_grid = np.linspace(0, 2 * math.pi, 50)
        cls.runs = []
        for n in range(3, 11):
            specs = [InitialStateSpec(f, n) for f in StateFamily if f is not StateFamily.THETA_FAMILY]
            specs.append(InitialStateSpec(StateFamily.THETA_FAMILY, n, 0.7))
            for spec in specs:
                cls.runs.append((
                    spec,
                    ed.evolve_and_reduce(spec, cls.t_grid),
                    collective.evolve_and_reduce(spec, cls.t_grid)
                ))

    def test_reduced_matrices_agree(self):
        """Test rho_0, rho_1, rho_01 and rho_2 agree in Frobenius norm"""
        for spec, exact, fast in self.runs:
            for a, b in zip(exact, fast):
                for name in ('rho_0', 'rho_1', 'rho_01', 'rho_2'):
                    distance = np.linalg.norm(getattr(a, name) - getattr(b, name))
                    self.assertLess(distance, 1e-10, f"{spec.label} {name}")

    def test_fidelity_matches_closed_forms(self):
        """Test the oracle fidelity reproduces every closed-form curve pointwise"""
        for spec, exact, _ in self.runs:
            if spec.family not in FIDELITY_FORMS:
                continue
            curve = np.array([fidelity(exact[0].rho_0, r.rho_0) for r in exact])
            closed = eval_fidelity_closed(spec.family, spec.n_bath, self.t_grid)
            np.testing.assert_allclose(curve, closed, rtol=0, atol=1e-10, err_msg=spec.label)


class TestCollectivePerformance(unittest.TestCase):
    """Timing of the collective engine at large N"""

    def test_thousand_spin_pair_layout_under_five_seconds(self):
        """Test N = 1000 with 200 samples is evolved and fully reduced in under 5 s"""
        collective.block_propagator.cache_clear()
        spec = InitialStateSpec(StateFamily.MAX_ENTANGLED_PAIR, 1000)
        start = time.perf_counter()
        records = collective.evolve_and_reduce(spec, np.linspace(0, 2 * math.pi, 200))
        elapsed = time.perf_counter() - start
        self.assertEqual(len(records), 200)
        self.assertIsNotNone(records[-1].rho_2)
        self.assertLess(elapsed, 5.0)


class TestLargeBathCoherence(unittest.TestCase):
    """Coherence sweeps at N = 500"""

    @classmethod
    def setUpClass(cls):
        cls.orchestrator = SimulationOrchestrator()
        thetas = [0.0, math.pi / 3, math.pi / 2]
        sweep = cls.orchestrator.run_coherence_sweep(500, thetas, math.pi, 21)
        cls.by_theta = dict(zip(thetas, sweep))

    def test_enhancement_at_theta_zero(self):
        """Test C0 peaks at least 0.1 above its initial value"""
        c0 = self.by_theta[0.0].c0
        self.assertAlmostEqual(c0[0], C0_INITIAL, places=10)
        self.assertGreater(np.max(c0), C0_INITIAL + 0.1)

    def test_quarter_period_matches_leading_order(self):
        """Test C0(pi/2) at theta = 0 is within 2e-3 of 1 - H_b(3/4)"""
        series = self.by_theta[0.0]
        index = int(np.argmin(np.abs(series.t - math.pi / 2)))
        self.assertAlmostEqual(series.c0[index], eval_coherence_closed("C0", 0.0, math.pi / 2), delta=2e-3)

    def test_no_enhancement_at_upper_end(self):
        """Test C0 never exceeds its initial value at theta = pi/2"""
        self.assertTrue(np.all(self.by_theta[math.pi / 2].c0 <= C0_INITIAL + 1e-4))

    def test_frozen_at_pi_over_three(self):
        """Test C0 stays within 3e-3 of its initial value"""
        self.assertLess(np.max(np.abs(self.by_theta[math.pi / 3].c0 - C0_INITIAL)), 3e-3)

    def test_window_flags_follow_coherence(self):
        """Test flags mark the rise at theta = 0"""
        flags = self.by_theta[0.0].window_flags['C0']
        self.assertEqual(flags[0], 0)
        self.assertIn(1, flags)

    def test_coherence_entanglement_tradeoff(self):
        """Test C0 rises while E01 falls on (0, pi/2] at theta = 0"""
        t_grid = [k * math.pi / 10 for k in range(0, 6)]
        series = self.orchestrator.coherence_service.run_theta(500, 0.0, t_grid)
        self.assertTrue(np.all(np.diff(series.c0) > 0))
        self.assertTrue(np.all(np.diff(series.e01) <= 1e-12))
        self.assertLess(series.e01[-1], series.e01[0])


class TestVerificationRun(unittest.TestCase):
    """Full verification through the orchestrator"""

    def test_appendix_grid_certifies_diagonal_elements(self):
        """Test the N = 4..10 table audit runs and certifies at least one diagonal element"""
        report = VerificationService().run_appendix_grid()
        self.assertEqual(report.n_range, list(range(4, 11)))
        self.assertEqual(report.exit_code, 0)
        for entry in report.appendix.values():
            self.assertEqual(entry.samples, 7 * 4 * 25)
        certified = [name for name in report.certified_elements() if name in DIAGONAL_ELEMENTS]
        self.assertTrue(certified)

    def test_matrix_passes_and_is_cached(self):
        """Test a passing run is reported in the system status"""
        orchestrator = SimulationOrchestrator()
        report = orchestrator.run_verification([3, 5], t_points=7, theta_points=3)
        self.assertEqual(report.exit_code, 0)
        status = orchestrator.get_system_status()
        self.assertEqual(status['verification']['failed'], 0)
        self.assertEqual(status['verification']['total'], report.get_summary()['total'])


if __name__ == '__main__':
    unittest.main()
