"""
Unit tests for the collective-spin engine
"""
import math
import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from src.core import ed
from src.core.analytic import eval_a11
from src.core.collective import (
    DOWN,
    UP,
    SectorLayout,
    SectorState,
    build_block_hamiltonians,
    build_sector_basis,
    cg_couple_down,
    cg_couple_up,
    coupled_to_product,
    evolve_sector,
    product_to_coupled,
    reduce_sector,
    reduce_trajectory,
    sector_hamiltonian,
    split_dicke,
)
from src.core.errors import DimensionMismatch, InvalidQuantumNumbers, NotNormalized
from src.core.states import sector_to_full

LAYOUTS = (SectorLayout.SYMMETRIC_BATH, SectorLayout.PAIR_PLUS_SYMMETRIC)


def basis_state(layout, n, index):
    vector = np.zeros(build_sector_basis(layout, n).dim)
    vector[index] = 1.0
    return SectorState(layout, n, vector)


class TestClebschGordan(unittest.TestCase):
    """Test spin-1/2 x spin-j coupling coefficients"""

    def test_two_spin_triplet_and_singlet(self):
        """Test |up>|1/2,-1/2> = (|1,0> + |0,0>)/sqrt(2)"""
        terms = {(j, m): c for j, m, c in cg_couple_down(UP, 0.5, -0.5)}
        self.assertAlmostEqual(terms[(1.0, 0.0)], 1 / math.sqrt(2))
        self.assertAlmostEqual(terms[(0.0, 0.0)], 1 / math.sqrt(2))
        terms = {(j, m): c for j, m, c in cg_couple_down(DOWN, 0.5, 0.5)}
        self.assertAlmostEqual(terms[(0.0, 0.0)], -1 / math.sqrt(2))

    def test_coefficients_normalized(self):
        """Test every product state expands with unit weight"""
        for j in (0.5, 1.0, 2.5, 7.0):
            for k in range(int(2 * j) + 1):
                for spin in (UP, DOWN):
                    weight = sum(c * c for _, _, c in cg_couple_down(spin, j, j - k))
                    self.assertAlmostEqual(weight, 1.0, places=12)

    def test_round_trip(self):
        """Test product -> coupled -> product is the identity and preserves norm"""
        rng = np.random.default_rng(21)
        for j in (0.5, 1.5, 3.0):
            size = 2 * (int(2 * j) + 1)
            v = rng.normal(size=size) + 1j * rng.normal(size=size)
            coupled = product_to_coupled(v, j)
            self.assertAlmostEqual(np.linalg.norm(coupled), np.linalg.norm(v), places=12)
            np.testing.assert_allclose(coupled_to_product(coupled, j), v, atol=1e-12)

    def test_up_and_down_tables_agree(self):
        """Test coupled-to-product coefficients transpose the product-to-coupled ones"""
        j = 2.0
        for k in range(5):
            for spin in (UP, DOWN):
                for big_j, big_m, coeff in cg_couple_down(spin, j, j - k):
                    back = {(s, m): c for s, m, c in cg_couple_up(big_j, big_m, j)}
                    self.assertAlmostEqual(back[(spin, j - k)], coeff, places=12)

    def test_invalid_quantum_numbers(self):
        """Test inconsistent (j, m) pairs are rejected"""
        with self.assertRaises(InvalidQuantumNumbers):
            cg_couple_down(UP, 1.0, 0.5)
        with self.assertRaises(InvalidQuantumNumbers):
            cg_couple_down(UP, 1.0, 2.0)
        with self.assertRaises(InvalidQuantumNumbers):
            cg_couple_up(3.0, 0.0, 1.0)


class TestSplitDicke(unittest.TestCase):
    """Test splitting one spin off a Dicke manifold"""

    def test_weights(self):
        """Test |n,k> has weight (n-k)/n on up and k/n on down"""
        n = 6
        for k in range(n + 1):
            amplitudes = np.zeros(n + 1)
            amplitudes[k] = 1.0
            split = split_dicke(amplitudes)
            self.assertAlmostEqual(float(np.sum(np.abs(split[UP]) ** 2)), (n - k) / n, places=12)
            self.assertAlmostEqual(float(np.sum(np.abs(split[DOWN]) ** 2)), k / n, places=12)

    def test_empty_manifold(self):
        """Test a zero-spin manifold cannot be split"""
        with self.assertRaises(DimensionMismatch):
            split_dicke(np.ones(1))


class TestSectorHamiltonian(unittest.TestCase):
    """Test the sector Hamiltonian and its blocks"""

    def test_matches_full_hamiltonian(self):
        """Test the sector matrix is the full Hamiltonian compressed to the sector"""
        for layout in LAYOUTS:
            for n in (2, 3, 5):
                dim = build_sector_basis(layout, n).dim
                embed = np.column_stack([sector_to_full(basis_state(layout, n, i)) for i in range(dim)])
                compressed = embed.conj().T @ ed.build_hamiltonian(n).matrix @ embed
                np.testing.assert_allclose(sector_hamiltonian(layout, n), compressed.real, atol=1e-12)

    def test_sector_is_invariant(self):
        """Test H maps the sector into itself"""
        n = 4
        for layout in LAYOUTS:
            dim = build_sector_basis(layout, n).dim
            embed = np.column_stack([sector_to_full(basis_state(layout, n, i)) for i in range(dim)])
            image = ed.build_hamiltonian(n).matrix @ embed
            residual = image - embed @ (embed.conj().T @ image)
            self.assertLess(float(np.max(np.abs(residual))), 1e-12)

    def test_blocks_form_direct_sum(self):
        """Test blocks reassemble the dense sector Hamiltonian"""
        for layout in LAYOUTS:
            n = 7
            dense = sector_hamiltonian(layout, n)
            rebuilt = np.zeros_like(dense)
            blocks = build_block_hamiltonians(layout, n)
            for block in blocks:
                self.assertLessEqual(block.size, layout.block_width)
                idx = np.array(block.indices)
                rebuilt[np.ix_(idx, idx)] = block.matrix
            np.testing.assert_allclose(rebuilt, dense, atol=1e-15)
            magnetizations = [b.doubled_m_tot for b in blocks]
            self.assertEqual(magnetizations, sorted(magnetizations, reverse=True))

    def test_symmetric_bath_spectrum(self):
        """Test the fully symmetric sector only has energies N/2 and -N/2 - 1"""
        n = 9
        eigenvalues = np.linalg.eigvalsh(sector_hamiltonian(SectorLayout.SYMMETRIC_BATH, n))
        for value in eigenvalues:
            self.assertTrue(
                min(abs(value - n / 2), abs(value + n / 2 + 1)) < 1e-10,
                f"unexpected eigenvalue {value}"
            )


class TestSectorEvolution(unittest.TestCase):
    """Test evolution and reduction in the sector basis"""

    def polarized(self, n):
        return SectorState.from_labels(SectorLayout.SYMMETRIC_BATH, n, {(DOWN, 0): 1.0})

    def test_norm_preserved_and_time_zero_exact(self):
        """Test unitary evolution keeps the norm and t = 0 returns the input"""
        state = SectorState.from_labels(
            SectorLayout.PAIR_PLUS_SYMMETRIC, 30,
            {(UP, DOWN, 0): 1 / math.sqrt(2), (DOWN, UP, 0): 1 / math.sqrt(2)}
        )
        trajectory = evolve_sector(state, np.linspace(0, 5, 11))
        np.testing.assert_allclose(np.linalg.norm(trajectory, axis=1), 1.0, atol=1e-12)
        np.testing.assert_array_equal(trajectory[0], state.amplitudes)

    def test_central_population_matches_closed_form(self):
        """Test the up population of the central spin follows 2N(1 - cos((N+1)t))/(N+1)^2"""
        n = 200
        t_grid = np.linspace(0, 0.1, 17)
        records = reduce_trajectory(SectorLayout.SYMMETRIC_BATH, n, evolve_sector(self.polarized(n), t_grid))
        populations = np.array([r.rho_0[UP, UP].real for r in records])
        np.testing.assert_allclose(populations, eval_a11(n, t_grid), atol=1e-10)

    def test_reduction_of_polarized_state(self):
        """Test |Down>|up...up> reduces to pure marginals"""
        record = reduce_sector(self.polarized(5))
        np.testing.assert_allclose(record.rho_0, np.diag([0.0, 1.0]), atol=1e-15)
        np.testing.assert_allclose(record.rho_1, np.diag([1.0, 0.0]), atol=1e-15)
        np.testing.assert_allclose(record.rho_2, np.diag([1.0, 0.0]), atol=1e-15)

    def test_single_bath_spin_has_no_second_spin(self):
        """Test rho_2 is None for N = 1"""
        self.assertIsNone(reduce_sector(self.polarized(1)).rho_2)

    def test_state_validation(self):
        """Test wrong lengths and norms are rejected"""
        with self.assertRaises(DimensionMismatch):
            SectorState(SectorLayout.SYMMETRIC_BATH, 3, np.ones(5) / math.sqrt(5))
        with self.assertRaises(NotNormalized):
            SectorState(SectorLayout.SYMMETRIC_BATH, 3, np.ones(8))


if __name__ == '__main__':
    unittest.main()
