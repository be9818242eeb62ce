"""
Collective-spin evolution engine
Permutation-symmetric bath sectors, block-diagonal Hamiltonian and reduced states at large N
"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import DimensionMismatch, InvalidParameter, InvalidQuantumNumbers, NotNormalized
from src.core.qmath import NORM_TOLERANCE, hermitian_eigen
from src.models.records import ReducedStates

logger = logging.getLogger(__name__)

UP = 0
DOWN = 1

Label = Tuple[int, ...]


class SectorLayout(Enum):
    """
    Coupled bases used by the engine

    SYMMETRIC_BATH: central qubit x Dicke(N), labels (q0, k)
    PAIR_PLUS_SYMMETRIC: central qubit x first bath qubit x Dicke(N-1), labels (q0, q1, k)

    k counts flipped (down) spins in the Dicke manifold, m = n/2 - k.
    """
    SYMMETRIC_BATH = "B"
    PAIR_PLUS_SYMMETRIC = "A"

    @property
    def qubits(self) -> int:
        return 1 if self is SectorLayout.SYMMETRIC_BATH else 2

    @property
    def block_width(self) -> int:
        """Largest block of fixed total magnetization"""
        return 2 * self.qubits

    def dicke_spins(self, n_bath: int) -> int:
        return n_bath if self is SectorLayout.SYMMETRIC_BATH else n_bath - 1


# --- Clebsch-Gordan coupling of a spin-1/2 to a spin-j ---

def _doubled(value: float, name: str) -> int:
    doubled = round(2.0 * value)
    if abs(2.0 * value - doubled) > 1e-9:
        raise InvalidQuantumNumbers(f"{name}={value} is not a multiple of 1/2")
    return int(doubled)


def _check_jm(j: float, m: float) -> Tuple[int, int]:
    dj, dm = _doubled(j, "j"), _doubled(m, "m")
    if dj < 0 or abs(dm) > dj or (dj - dm) % 2:
        raise InvalidQuantumNumbers(f"Inconsistent quantum numbers j={j}, m={m}")
    return dj, dm


def cg_couple_down(spin: int, j: float, m: float) -> List[Tuple[float, float, float]]:
    """
    Expand a product state |spin>|j, m> in the coupled basis

    Args:
        spin: UP or DOWN for the spin-1/2
        j: Spin of the partner
        m: Magnetic number of the partner

    Returns:
        (J, M, coefficient) triples with J in {j + 1/2, j - 1/2}

    Raises:
        InvalidQuantumNumbers: If (j, m) is not a valid pair or spin is not 0/1
    """
    dj, dm = _check_jm(j, m)
    if spin not in (UP, DOWN):
        raise InvalidQuantumNumbers(f"Spin label must be UP (0) or DOWN (1), got {spin}")
    norm = math.sqrt(dj + 1)
    if spin == UP:
        terms = [
            (dj + 1, dm + 1, math.sqrt((dj + dm) / 2 + 1) / norm),
            (dj - 1, dm + 1, math.sqrt((dj - dm) / 2) / norm),
        ]
    else:
        terms = [
            (dj + 1, dm - 1, math.sqrt((dj - dm) / 2 + 1) / norm),
            (dj - 1, dm - 1, -math.sqrt((dj + dm) / 2) / norm),
        ]
    return [
        (dbig_j / 2, dbig_m / 2, coeff)
        for dbig_j, dbig_m, coeff in terms
        if dbig_j >= 0 and abs(dbig_m) <= dbig_j and coeff != 0.0
    ]


def cg_couple_up(big_j: float, big_m: float, j: float) -> List[Tuple[int, float, float]]:
    """
    Expand a coupled state |J, M> of spin-1/2 and spin-j in product states

    Returns:
        (spin, m, coefficient) triples for |spin>|j, m>

    Raises:
        InvalidQuantumNumbers: If J is not j +- 1/2 or (J, M) is invalid
    """
    dbig_j, dbig_m = _check_jm(big_j, big_m)
    dj = _doubled(j, "j")
    if dj < 0 or dbig_j not in (dj + 1, dj - 1):
        raise InvalidQuantumNumbers(f"J={big_j} cannot be reached by coupling 1/2 to j={j}")
    norm = math.sqrt(dj + 1)
    plus = math.sqrt((dj + dbig_m) / 2 + 0.5) / norm
    minus = math.sqrt(max((dj - dbig_m) / 2 + 0.5, 0.0)) / norm
    if dbig_j == dj + 1:
        terms = [(UP, dbig_m - 1, plus), (DOWN, dbig_m + 1, minus)]
    else:
        terms = [(UP, dbig_m - 1, minus), (DOWN, dbig_m + 1, -plus)]
    return [
        (spin, dm / 2, coeff)
        for spin, dm, coeff in terms
        if abs(dm) <= dj and coeff != 0.0
    ]


def _coupled_index(dj: int, dbig_j: int, dbig_m: int) -> int:
    # J = j + 1/2 occupies the first 2j + 2 slots, J = j - 1/2 the rest
    offset = 0 if dbig_j == dj + 1 else dj + 2
    return offset + (dbig_j - dbig_m) // 2


def product_to_coupled(vector: Sequence[complex], j: float) -> np.ndarray:
    """
    Convert amplitudes over |spin>|j, m> to the coupled basis

    Product index is spin * (2j + 1) + k with m = j - k; coupled index lists
    |j + 1/2, M> from the top, then |j - 1/2, M> from the top.
    """
    dj = _doubled(j, "j")
    size = 2 * (dj + 1)
    amplitudes = np.asarray(vector, dtype=complex).reshape(-1)
    if amplitudes.shape[0] != size:
        raise DimensionMismatch(f"Expected {size} amplitudes for j={j}, got {amplitudes.shape[0]}")
    coupled = np.zeros(size, dtype=complex)
    for spin in (UP, DOWN):
        for k in range(dj + 1):
            amplitude = amplitudes[spin * (dj + 1) + k]
            if amplitude == 0:
                continue
            for big_j, big_m, coeff in cg_couple_down(spin, j, j - k):
                coupled[_coupled_index(dj, round(2 * big_j), round(2 * big_m))] += coeff * amplitude
    return coupled


def coupled_to_product(vector: Sequence[complex], j: float) -> np.ndarray:
    """Inverse of product_to_coupled, built from the coupled-to-product relations"""
    dj = _doubled(j, "j")
    size = 2 * (dj + 1)
    amplitudes = np.asarray(vector, dtype=complex).reshape(-1)
    if amplitudes.shape[0] != size:
        raise DimensionMismatch(f"Expected {size} amplitudes for j={j}, got {amplitudes.shape[0]}")
    product = np.zeros(size, dtype=complex)
    for dbig_j in (dj + 1, dj - 1):
        for dbig_m in range(dbig_j, -dbig_j - 1, -2):
            amplitude = amplitudes[_coupled_index(dj, dbig_j, dbig_m)]
            if amplitude == 0:
                continue
            for spin, m, coeff in cg_couple_up(dbig_j / 2, dbig_m / 2, j):
                k = (dj - round(2 * m)) // 2
                product[spin * (dj + 1) + k] += coeff * amplitude
    return product


@lru_cache(maxsize=None)
def _split_weights(n_spins: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Weights of |n, k> on |up>|n-1, k> and on |down>|n-1, k-1>

    The Dicke state of n spins is the stretched J = j + 1/2 state of one
    spin coupled to the remaining n - 1.
    """
    up = np.zeros(n_spins + 1)
    down = np.zeros(n_spins + 1)
    rest = (n_spins - 1) / 2
    for k in range(n_spins + 1):
        for spin, _, coeff in cg_couple_up(n_spins / 2, n_spins / 2 - k, rest):
            if spin == UP:
                up[k] = coeff
            else:
                down[k] = coeff
    up.flags.writeable = False
    down.flags.writeable = False
    return up, down


def split_dicke(amplitudes: np.ndarray) -> np.ndarray:
    """
    Split one spin off a Dicke manifold

    Args:
        amplitudes: Array whose last axis runs over k = 0..n of Dicke(n)

    Returns:
        Array with last two axes (spin, k') over spin x Dicke(n-1)
    """
    n_spins = amplitudes.shape[-1] - 1
    if n_spins < 1:
        raise DimensionMismatch("Cannot split a spin off an empty Dicke manifold")
    up, down = _split_weights(n_spins)
    split = np.empty(amplitudes.shape[:-1] + (2, n_spins), dtype=complex)
    split[..., UP, :] = amplitudes[..., :-1] * up[:-1]
    split[..., DOWN, :] = amplitudes[..., 1:] * down[1:]
    return split


# --- Sector bases and block Hamiltonians ---

@dataclass(frozen=True)
class SectorBasis:
    """
    Enumeration of sector labels for one layout and bath size

    Attributes:
        layout: Sector layout
        n_bath: Bath size N
        labels: Labels in index order
    """
    layout: SectorLayout
    n_bath: int
    labels: Tuple[Label, ...]

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def dicke_spins(self) -> int:
        return self.layout.dicke_spins(self.n_bath)

    def index(self, label: Label) -> int:
        """Position of a label, qubit code major and Dicke k minor"""
        *qubits, k = label
        code = 0
        for q in qubits:
            code = 2 * code + q
        return code * (self.dicke_spins + 1) + k

    def doubled_magnetization(self, label: Label) -> int:
        """2 M_tot of a label"""
        *qubits, k = label
        return sum(1 - 2 * q for q in qubits) + self.dicke_spins - 2 * k


def _check_layout_size(layout: SectorLayout, n_bath: int) -> None:
    if isinstance(n_bath, bool) or int(n_bath) != n_bath or n_bath < 1:
        raise InvalidParameter(f"Bath size must be a positive integer, got {n_bath!r}")


@lru_cache(maxsize=16)
def build_sector_basis(layout: SectorLayout, n_bath: int) -> SectorBasis:
    """All labels of a layout, ordered by index"""
    _check_layout_size(layout, n_bath)
    ks = range(layout.dicke_spins(n_bath) + 1)
    if layout is SectorLayout.SYMMETRIC_BATH:
        labels = tuple((q0, k) for q0 in (UP, DOWN) for k in ks)
    else:
        labels = tuple((q0, q1, k) for q0 in (UP, DOWN) for q1 in (UP, DOWN) for k in ks)
    return SectorBasis(layout=layout, n_bath=n_bath, labels=labels)


def _partners(basis: SectorBasis, label: Label):
    """(s^z, lowered, raised) of every spin coupled to the central one"""
    k = label[-1]
    n = basis.dicke_spins
    lowered = (label[:-1] + (k + 1,), math.sqrt((n - k) * (k + 1))) if k < n else None
    raised = (label[:-1] + (k - 1,), math.sqrt(k * (n - k + 1))) if k > 0 else None
    yield n / 2 - k, lowered, raised

    if basis.layout is SectorLayout.PAIR_PLUS_SYMMETRIC:
        q0, q1, _ = label
        lowered = ((q0, DOWN, k), 1.0) if q1 == UP else None
        raised = ((q0, UP, k), 1.0) if q1 == DOWN else None
        yield 0.5 - q1, lowered, raised


def _apply_hamiltonian(basis: SectorBasis, label: Label) -> Dict[Label, float]:
    """H|label> with H = 2 S0.X summed over partners X"""
    terms: Dict[Label, float] = defaultdict(float)
    q0 = label[0]
    s0z = 0.5 - q0
    for z, lowered, raised in _partners(basis, label):
        terms[label] += 2.0 * s0z * z
        # S0+ X- and S0- X+
        if q0 == DOWN and lowered is not None:
            target, amplitude = lowered
            terms[(UP,) + target[1:]] += amplitude
        if q0 == UP and raised is not None:
            target, amplitude = raised
            terms[(DOWN,) + target[1:]] += amplitude
    return dict(terms)


def sector_hamiltonian(layout: SectorLayout, n_bath: int) -> np.ndarray:
    """Dense sector Hamiltonian over the whole layout basis"""
    basis = build_sector_basis(layout, n_bath)
    matrix = np.zeros((basis.dim, basis.dim))
    for label in basis.labels:
        column = basis.index(label)
        for target, amplitude in _apply_hamiltonian(basis, label).items():
            matrix[basis.index(target), column] += amplitude
    return matrix


@dataclass(frozen=True)
class BlockHamiltonian:
    """
    Hamiltonian restricted to one total-magnetization block

    Attributes:
        doubled_m_tot: 2 M_tot of the block
        indices: Sector indices spanned by the block
        matrix: Dense real symmetric block
    """
    doubled_m_tot: int
    indices: Tuple[int, ...]
    matrix: np.ndarray

    @property
    def m_tot(self) -> float:
        return self.doubled_m_tot / 2

    @property
    def size(self) -> int:
        return len(self.indices)


@lru_cache(maxsize=16)
def build_block_hamiltonians(layout: SectorLayout, n_bath: int) -> Tuple[BlockHamiltonian, ...]:
    """
    Blocks of fixed M_tot, highest magnetization first

    Args:
        layout: Sector layout
        n_bath: Bath size N

    Returns:
        Tuple of BlockHamiltonian whose direct sum is the sector Hamiltonian
    """
    basis = build_sector_basis(layout, n_bath)
    grouped: Dict[int, List[Label]] = defaultdict(list)
    for label in basis.labels:
        grouped[basis.doubled_magnetization(label)].append(label)

    blocks = []
    for doubled_m in sorted(grouped, reverse=True):
        labels = grouped[doubled_m]
        position = {label: i for i, label in enumerate(labels)}
        matrix = np.zeros((len(labels), len(labels)))
        for label in labels:
            for target, amplitude in _apply_hamiltonian(basis, label).items():
                matrix[position[target], position[label]] += amplitude
        matrix.flags.writeable = False
        blocks.append(BlockHamiltonian(
            doubled_m_tot=doubled_m,
            indices=tuple(basis.index(label) for label in labels),
            matrix=matrix
        ))
    logger.info("Built %d blocks for layout %s, N=%d", len(blocks), layout.value, n_bath)
    return tuple(blocks)


class BlockPropagator:
    """
    Vectorized exp(-iHt) over all blocks of a layout

    Blocks are padded to the layout's block width with a scratch slot that
    always carries zero amplitude.
    """

    def __init__(self, layout: SectorLayout, n_bath: int):
        self.basis = build_sector_basis(layout, n_bath)
        blocks = build_block_hamiltonians(layout, n_bath)
        width = layout.block_width
        scratch = self.basis.dim

        self.indices = np.full((len(blocks), width), scratch, dtype=int)
        self.energies = np.zeros((len(blocks), width))
        self.vectors = np.zeros((len(blocks), width, width))
        for b, block in enumerate(blocks):
            size = block.size
            spectrum = hermitian_eigen(block.matrix)
            self.indices[b, :size] = block.indices
            self.energies[b, :size] = spectrum.eigenvalues
            self.vectors[b] = np.eye(width)
            self.vectors[b, :size, :size] = np.real(spectrum.eigenvectors)

    def evolve_many(self, amplitudes: np.ndarray, t_grid: Sequence[float]) -> np.ndarray:
        """
        Returns:
            Array of shape (len(t_grid), dim)
        """
        times = np.asarray(t_grid, dtype=float).reshape(-1)
        padded = np.append(amplitudes, 0.0)
        coefficients = np.einsum('bji,bj->bi', self.vectors, padded[self.indices])
        phases = np.exp(-1j * times[:, None, None] * self.energies[None, :, :])
        evolved = np.einsum('bij,tbj->tbi', self.vectors, phases * coefficients[None, :, :])

        states = np.zeros((len(times), self.basis.dim + 1), dtype=complex)
        states[:, self.indices] = evolved
        states = states[:, :-1]
        states[times == 0.0] = amplitudes
        return states


@lru_cache(maxsize=16)
def block_propagator(layout: SectorLayout, n_bath: int) -> BlockPropagator:
    return BlockPropagator(layout, n_bath)


# --- Sector states, evolution and reduction ---

@dataclass(frozen=True)
class SectorState:
    """
    Pure state over a sector basis

    Attributes:
        layout: Sector layout
        n_bath: Bath size N
        amplitudes: Complex amplitudes in basis index order
    """
    layout: SectorLayout
    n_bath: int
    amplitudes: np.ndarray

    def __post_init__(self):
        expected = build_sector_basis(self.layout, self.n_bath).dim
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape[0] != expected:
            raise DimensionMismatch(f"Sector state needs {expected} amplitudes, got {amplitudes.shape[0]}")
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise NotNormalized(f"Sector state norm {norm:.12g} is not 1")
        amplitudes.flags.writeable = False
        object.__setattr__(self, 'amplitudes', amplitudes)

    @property
    def basis(self) -> SectorBasis:
        return build_sector_basis(self.layout, self.n_bath)

    @classmethod
    def from_labels(cls, layout: SectorLayout, n_bath: int, amplitudes: Dict[Label, complex]) -> 'SectorState':
        basis = build_sector_basis(layout, n_bath)
        vector = np.zeros(basis.dim, dtype=complex)
        for label, amplitude in amplitudes.items():
            vector[basis.index(label)] += amplitude
        return cls(layout=layout, n_bath=n_bath, amplitudes=vector)


def evolve_sector(state: SectorState, t_grid: Sequence[float]) -> np.ndarray:
    """
    Evolve a sector state over a time grid

    Returns:
        Array of shape (len(t_grid), dim) of sector amplitudes
    """
    return block_propagator(state.layout, state.n_bath).evolve_many(state.amplitudes, t_grid)


def _pair_tensor(layout: SectorLayout, n_bath: int, amplitudes: np.ndarray) -> np.ndarray:
    """Amplitudes as (T, q0, q1, k) over q0 x q1 x Dicke(N-1)"""
    times = amplitudes.shape[0]
    if layout is SectorLayout.PAIR_PLUS_SYMMETRIC:
        return amplitudes.reshape(times, 2, 2, n_bath)
    return split_dicke(amplitudes.reshape(times, 2, n_bath + 1))


def reduce_trajectory(layout: SectorLayout, n_bath: int, amplitudes: np.ndarray) -> List[ReducedStates]:
    """
    Reduced states for every row of an evolved trajectory

    Args:
        layout: Layout of the amplitudes
        n_bath: Bath size N
        amplitudes: Array (T, dim) or a single state (dim,)

    Returns:
        One ReducedStates per row; rho_2 is None when N = 1
    """
    rows = np.atleast_2d(np.asarray(amplitudes, dtype=complex))
    expected = build_sector_basis(layout, n_bath).dim
    if rows.shape[1] != expected:
        raise DimensionMismatch(f"Trajectory rows have {rows.shape[1]} amplitudes, expected {expected}")

    pair = _pair_tensor(layout, n_bath, rows)
    rho_01 = np.einsum('tabk,tcdk->tabcd', pair, pair.conj()).reshape(-1, 4, 4)
    rho_0 = np.einsum('tabk,tcbk->tac', pair, pair.conj())
    rho_1 = np.einsum('tabk,tadk->tbd', pair, pair.conj())
    rho_2: List[Optional[np.ndarray]] = [None] * rows.shape[0]
    if n_bath >= 2:
        # spin 2 is split off the symmetric remainder
        triple = split_dicke(pair)
        rho_2 = list(np.einsum('tabxk,tabyk->txy', triple, triple.conj()))

    return [
        ReducedStates(rho_0=rho_0[i], rho_1=rho_1[i], rho_01=rho_01[i], rho_2=rho_2[i])
        for i in range(rows.shape[0])
    ]


def reduce_sector(state: SectorState) -> ReducedStates:
    """Reduced states of one sector state"""
    return reduce_trajectory(state.layout, state.n_bath, state.amplitudes[None, :])[0]


def evolve_and_reduce(spec, t_grid: Sequence[float]) -> List[ReducedStates]:
    """
    Evolve an initial state specification and reduce at every grid time

    Mixtures are evolved component by component and recombined.

    Args:
        spec: InitialStateSpec
        t_grid: Sample times

    Returns:
        One ReducedStates per grid time
    """
    from src.core.states import build_sector_state

    ensemble = build_sector_state(spec)
    per_component = []
    for weight, state in ensemble.components:
        trajectory = evolve_sector(state, t_grid)
        per_component.append((weight, reduce_trajectory(state.layout, state.n_bath, trajectory)))
    if ensemble.is_pure:
        return per_component[0][1]
    return [
        ReducedStates.mix([(weight, records[i]) for weight, records in per_component])
        for i in range(len(per_component[0][1]))
    ]
