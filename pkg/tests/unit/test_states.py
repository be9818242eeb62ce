"""
Unit tests for initial state constructors and state specifications
"""
import math
import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from src.core.errors import InvalidParameter, MaximalEntanglementExcluded, TooLarge
from src.core.measures import bloch_from_rho, concurrence_mixed, concurrence_pure
from src.core.qmath import partial_trace
from src.core.states import (
    FULL_STATE_MAX_BATH,
    amplitudes_from_angles,
    build_full_state,
    build_sector_state,
    build_theta_pair,
    dicke_vector,
    sector_to_full,
    theta_pair_amplitudes,
)
from src.models.records import BlochVector
from src.models.state_spec import InitialStateSpec, SixAngles, StateFamily

CENTRAL_MARGINAL = np.array([[0.5, 0.125], [0.125, 0.5]])


class TestInitialStateSpec(unittest.TestCase):
    """Test state specification validation"""

    def test_family_minimum_sizes(self):
        """Test pair families and the W bath need N >= 2"""
        InitialStateSpec("product", 1)
        InitialStateSpec("ghz", 1)
        for family in ("w", "ep"):
            with self.assertRaises(InvalidParameter):
                InitialStateSpec(family, 1)
        with self.assertRaises(InvalidParameter):
            InitialStateSpec("theta", 1, 0.2)

    def test_theta_required_only_for_theta_family(self):
        """Test theta is mandatory for the theta family and rejected elsewhere"""
        with self.assertRaises(InvalidParameter):
            InitialStateSpec("theta", 4)
        with self.assertRaises(InvalidParameter):
            InitialStateSpec("product", 4, 0.3)

    def test_theta_range(self):
        """Test theta outside [0, pi/2] is rejected"""
        with self.assertRaises(InvalidParameter):
            InitialStateSpec("theta", 4, 2.0)
        with self.assertRaises(InvalidParameter):
            InitialStateSpec("theta", 4, -0.1)

    def test_parse_by_name_and_value(self):
        """Test families resolve from CLI values and enum names"""
        self.assertIs(StateFamily.parse("ep"), StateFamily.MAX_ENTANGLED_PAIR)
        self.assertIs(StateFamily.parse("GHZ_BATH"), StateFamily.GHZ_BATH)
        with self.assertRaises(InvalidParameter):
            StateFamily.parse("cluster")

    def test_dict_round_trip(self):
        """Test to_dict/from_dict preserve equality"""
        spec = InitialStateSpec("theta", 5, 0.4)
        self.assertEqual(InitialStateSpec.from_dict(spec.to_dict()), spec)
        self.assertIn("theta", spec.label)


class TestSixAngles(unittest.TestCase):
    """Test the six-angle pure-state parameterization"""

    def test_product_corner(self):
        """Test all-zero angles give |Up up>"""
        amplitudes = amplitudes_from_angles(SixAngles(0, 0, 0, 0, 0, 0))
        np.testing.assert_allclose(amplitudes, [1, 0, 0, 0], atol=1e-15)

    def test_reference_slice_matches_real_amplitudes(self):
        """Test the theta slice gives the real (a, b, c, d) table"""
        for theta in np.linspace(0, math.pi / 2, 7):
            np.testing.assert_allclose(
                amplitudes_from_angles(SixAngles.reference_slice(theta)),
                theta_pair_amplitudes(theta),
                atol=1e-12
            )

    def test_random_angles(self):
        """Test normalization, concurrence sin(chi) and both marginal Bloch vectors"""
        rng = np.random.default_rng(77)
        for _ in range(200):
            chi = rng.uniform(0.05, math.pi / 2 - 0.05)
            theta0, theta1 = rng.uniform(0.05, math.pi - 0.05, size=2)
            phi0, phi1, gamma = rng.uniform(0, 2 * math.pi, size=3)
            psi = amplitudes_from_angles(SixAngles(chi, theta0, phi0, theta1, phi1, gamma))
            self.assertAlmostEqual(float(np.linalg.norm(psi)), 1.0, places=12)
            self.assertAlmostEqual(concurrence_pure(psi), math.sin(chi), places=10)
            for keep, (theta, phi) in (([0], (theta0, phi0)), ([1], (theta1, phi1))):
                found = bloch_from_rho(partial_trace(psi, [2, 2], keep)).cartesian()
                expected = BlochVector(math.cos(chi), theta, phi).cartesian()
                np.testing.assert_allclose(found, expected, atol=1e-10)

    def test_maximal_entanglement_excluded(self):
        """Test chi = pi/2 is rejected"""
        with self.assertRaises(MaximalEntanglementExcluded):
            SixAngles(math.pi / 2, 0, 0, 0, 0, 0)

    def test_non_finite_rejected(self):
        """Test NaN angles are rejected"""
        with self.assertRaises(InvalidParameter):
            SixAngles(0.1, float("nan"), 0, 0, 0, 0)


class TestThetaPair(unittest.TestCase):
    """Test the theta-family two-qubit mixture"""

    def test_trace_and_positivity(self):
        """Test unit trace and non-negative spectrum on a theta grid"""
        for theta in np.linspace(0, math.pi / 2, 9):
            rho = build_theta_pair(theta)
            self.assertAlmostEqual(np.trace(rho).real, 1.0, places=12)
            self.assertGreater(np.linalg.eigvalsh(rho)[0], -1e-12)

    def test_central_marginal_independent_of_theta(self):
        """Test the central-spin marginal is [[1/2,1/8],[1/8,1/2]] for every theta"""
        for theta in np.linspace(0, math.pi / 2, 9):
            marginal = partial_trace(build_theta_pair(theta), [2, 2], [0])
            np.testing.assert_allclose(marginal, CENTRAL_MARGINAL, atol=1e-12)

    def test_concurrence_at_upper_end(self):
        """Test the theta = pi/2 mixture has concurrence sqrt(3)/4"""
        self.assertAlmostEqual(concurrence_mixed(build_theta_pair(math.pi / 2)), math.sqrt(3) / 4, places=10)

    def test_out_of_range(self):
        """Test InvalidParameter outside [0, pi/2]"""
        with self.assertRaises(InvalidParameter):
            build_theta_pair(1.7)


class TestFullStates(unittest.TestCase):
    """Test full tensor-basis constructors"""

    def test_product_bath(self):
        """Test N = 2 gives |Down up up>"""
        psi = build_full_state(InitialStateSpec("product", 2)).pure_state()
        expected = np.zeros(8)
        expected[0b100] = 1.0
        np.testing.assert_allclose(psi, expected)

    def test_w_bath(self):
        """Test N = 2 gives |Down> (|down up> + |up down>)/sqrt(2)"""
        psi = build_full_state(InitialStateSpec("w", 2)).pure_state()
        expected = np.zeros(8)
        expected[[0b101, 0b110]] = 1 / math.sqrt(2)
        np.testing.assert_allclose(psi, expected, atol=1e-15)

    def test_ghz_bath(self):
        """Test N = 3 puts 1/sqrt(2) on |Down up up up> and |Down down down down>"""
        psi = build_full_state(InitialStateSpec("ghz", 3)).pure_state()
        self.assertAlmostEqual(psi[0b1000], 1 / math.sqrt(2))
        self.assertAlmostEqual(psi[0b1111], 1 / math.sqrt(2))
        self.assertAlmostEqual(float(np.linalg.norm(psi)), 1.0, places=14)

    def test_entangled_pair(self):
        """Test N = 2 gives (|Up down> + |Down up>)/sqrt(2) times |up>"""
        psi = build_full_state(InitialStateSpec("ep", 2)).pure_state()
        expected = np.zeros(8)
        expected[[0b010, 0b100]] = 1 / math.sqrt(2)
        np.testing.assert_allclose(psi, expected, atol=1e-15)

    def test_theta_family_is_three_component_mixture(self):
        """Test weights (1/2, 1/4, 1/4) of unit vectors"""
        ensemble = build_full_state(InitialStateSpec("theta", 3, 0.5))
        self.assertEqual(ensemble.weights, (0.5, 0.25, 0.25))
        for _, psi in ensemble.components:
            self.assertAlmostEqual(float(np.linalg.norm(psi)), 1.0, places=12)

    def test_guard(self):
        """Test TooLarge above the full-basis limit"""
        with self.assertRaises(TooLarge):
            build_full_state(InitialStateSpec("product", FULL_STATE_MAX_BATH + 1))

    def test_dicke_vector(self):
        """Test Dicke vectors are normalized and reject bad k"""
        self.assertAlmostEqual(float(np.linalg.norm(dicke_vector(5, 2))), 1.0, places=14)
        with self.assertRaises(InvalidParameter):
            dicke_vector(3, 4)


class TestSectorStates(unittest.TestCase):
    """Test sector-basis constructors against the full basis"""

    def specs(self, n):
        return [
            InitialStateSpec("product", n),
            InitialStateSpec("ghz", n),
            InitialStateSpec("w", n),
            InitialStateSpec("ep", n),
            InitialStateSpec("theta", n, 0.0),
            InitialStateSpec("theta", n, 0.9),
        ]

    def test_round_trip_to_full_basis(self):
        """Test sector states embed onto the full-basis constructions"""
        for n in range(2, 9):
            for spec in self.specs(n):
                sector = build_sector_state(spec)
                full = build_full_state(spec)
                self.assertEqual(sector.weights, full.weights)
                for (_, s), (_, f) in zip(sector.components, full.components):
                    np.testing.assert_allclose(sector_to_full(s), f, atol=1e-12)

    def test_large_bath_needs_no_full_basis(self):
        """Test sector states build for N far beyond the full-basis guard"""
        state = build_sector_state(InitialStateSpec("w", 1000)).pure_state()
        self.assertAlmostEqual(float(np.linalg.norm(state.amplitudes)), 1.0, places=14)
        with self.assertRaises(TooLarge):
            sector_to_full(state)


if __name__ == '__main__':
    unittest.main()
