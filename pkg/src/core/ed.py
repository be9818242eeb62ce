"""
Exact diagonalization oracle
Dense full-basis Hamiltonian, spectral evolution and reduced density matrices for small N
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from src.core.errors import InvalidParameter, TooLarge
from src.core.qmath import SpectralPropagator, partial_trace
from src.core.states import build_full_state
from src.models.records import ReducedStates

logger = logging.getLogger(__name__)

ED_MAX_BATH = 11

SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]])
SIGMA_MINUS = SIGMA_PLUS.T
SPIN_Z = np.diag([0.5, -0.5])


def _check_bath_size(n_bath: int) -> int:
    if isinstance(n_bath, bool) or int(n_bath) != n_bath or n_bath < 1:
        raise InvalidParameter(f"Bath size must be a positive integer, got {n_bath!r}")
    if n_bath > ED_MAX_BATH:
        raise TooLarge(f"Dense diagonalization limited to N <= {ED_MAX_BATH}, got {n_bath}")
    return int(n_bath)


@dataclass(frozen=True)
class FullHamiltonian:
    """
    Dense Hamiltonian on N + 1 spins, spin 0 most significant

    Attributes:
        n_bath: Bath size N
        matrix: Real symmetric matrix of dimension 2^(N+1)
    """
    n_bath: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def sz_commutator_norm(self) -> float:
        """Frobenius norm of [H, S^z_tot]"""
        sz = total_sz(self.n_bath)
        return float(np.linalg.norm(self.matrix * (sz[None, :] - sz[:, None])))


def total_sz(n_bath: int) -> np.ndarray:
    """Diagonal of S^z_tot in the full basis (bit 0 = up)"""
    n_spins = _check_bath_size(n_bath) + 1
    index = np.arange(2 ** n_spins)
    down = np.zeros_like(index)
    for shift in range(n_spins):
        down += (index >> shift) & 1
    return n_spins / 2 - down


@lru_cache(maxsize=4)
def build_hamiltonian(n_bath: int) -> FullHamiltonian:
    """
    H = 2 sum_j S_0 . S_j by bit manipulation

    Raises:
        TooLarge: If N exceeds ED_MAX_BATH
    """
    n = _check_bath_size(n_bath)
    dim = 2 ** (n + 1)
    index = np.arange(dim)
    central = (index >> n) & 1
    matrix = np.zeros((dim, dim))

    for j in range(1, n + 1):
        bath = (index >> (n - j)) & 1
        aligned = central == bath
        matrix[index, index] += np.where(aligned, 0.5, -0.5)
        # flip-flop S0+ Sj- + S0- Sj+ connects antiparallel pairs
        flipped = index[~aligned]
        matrix[flipped, flipped ^ ((1 << n) | (1 << (n - j)))] += 1.0

    matrix.flags.writeable = False
    logger.info("Built full Hamiltonian for N=%d (dim=%d)", n, dim)
    return FullHamiltonian(n_bath=n, matrix=matrix)


def _site_operator(op: np.ndarray, site: int, n_spins: int) -> np.ndarray:
    result = np.ones((1, 1))
    for s in range(n_spins):
        result = np.kron(result, op if s == site else np.eye(2))
    return result


def _casimir(sites: Sequence[int], n_spins: int) -> np.ndarray:
    """S^2 of the summed spins on the given sites"""
    plus = sum(_site_operator(SIGMA_PLUS, s, n_spins) for s in sites)
    minus = sum(_site_operator(SIGMA_MINUS, s, n_spins) for s in sites)
    z = sum(_site_operator(SPIN_Z, s, n_spins) for s in sites)
    return z @ z + 0.5 * (plus @ minus + minus @ plus)


def build_casimir_hamiltonian(n_bath: int) -> np.ndarray:
    """S_tot^2 - S_b^2 - S_0^2 from explicit tensor-product spin operators"""
    n = _check_bath_size(n_bath)
    n_spins = n + 1
    return (
        _casimir(range(n_spins), n_spins)
        - _casimir(range(1, n_spins), n_spins)
        - _casimir([0], n_spins)
    )


@lru_cache(maxsize=4)
def _propagator(n_bath: int) -> SpectralPropagator:
    return SpectralPropagator(build_hamiltonian(n_bath).matrix)


def spectrum(n_bath: int) -> np.ndarray:
    """Ascending eigenvalues of the full Hamiltonian"""
    return np.array(_propagator(_check_bath_size(n_bath)).spectrum.eigenvalues)


def reduce_full_state(psi: np.ndarray, n_bath: int) -> ReducedStates:
    """Reduced states of spins 0, 1, (0, 1) and 2 from a full state vector"""
    dims = [2] * (n_bath + 1)
    if n_bath == 1:
        rho_01 = partial_trace(psi, dims, [0, 1])
        rho_2 = None
    else:
        rho_012 = partial_trace(psi, dims, [0, 1, 2])
        rho_01 = partial_trace(rho_012, [2, 2, 2], [0, 1])
        rho_2 = partial_trace(rho_012, [2, 2, 2], [2])
    return ReducedStates(
        rho_0=partial_trace(rho_01, [2, 2], [0]),
        rho_1=partial_trace(rho_01, [2, 2], [1]),
        rho_01=rho_01,
        rho_2=rho_2
    )


def evolve_full(spec, t_grid: Sequence[float]) -> List[Tuple[float, np.ndarray]]:
    """Evolved full state vectors, one trajectory (T, dim) per ensemble component"""
    propagator = _propagator(_check_bath_size(spec.n_bath))
    return [
        (weight, propagator.evolve_many(psi, t_grid))
        for weight, psi in build_full_state(spec).components
    ]


def evolve_and_reduce(spec, t_grid: Sequence[float]) -> List[ReducedStates]:
    """
    Evolve a state specification exactly and reduce at every grid time

    Args:
        spec: InitialStateSpec
        t_grid: Sample times

    Returns:
        One ReducedStates per grid time

    Raises:
        TooLarge: If N exceeds ED_MAX_BATH
    """
    trajectories = evolve_full(spec, t_grid)
    records = []
    for i in range(len(np.atleast_1d(t_grid))):
        parts = [(weight, reduce_full_state(states[i], spec.n_bath)) for weight, states in trajectories]
        records.append(parts[0][1] if len(parts) == 1 else ReducedStates.mix(parts))
    return records
