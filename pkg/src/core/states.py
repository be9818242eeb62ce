"""
Initial state constructors
Full tensor-basis and sector-basis states for every initial family
"""
import math
from typing import List, Tuple

import numpy as np

from src.core.collective import DOWN, UP, SectorLayout, SectorState
from src.core.errors import InvalidParameter, TooLarge
from src.models.records import StateEnsemble
from src.models.state_spec import (
    ANGLE_TOLERANCE,
    THETA_MAX,
    THETA_MIN,
    InitialStateSpec,
    SixAngles,
    StateFamily,
)

FULL_STATE_MAX_BATH = 14

# two-qubit index 2 q0 + q1: |Up up>, |Up down>, |Down up>, |Down down>
SINGLET_LIKE_PAIR = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2.0)
QUBIT = {UP: np.array([1.0, 0.0]), DOWN: np.array([0.0, 1.0])}


def amplitudes_from_angles(s: SixAngles) -> np.ndarray:
    """
    Amplitudes (a, b, c, d) of a|Up up> + b|Up down> + c|Down up> + d|Down down>

    Both marginals have Bloch length cos(chi), pointing along (theta0, phi0)
    for the central spin and (theta1, phi1) for the bath spin; the
    concurrence is sin(chi).

    Raises:
        MaximalEntanglementExcluded: Raised when constructing SixAngles with chi = pi/2
    """
    cx, sx = math.cos(s.chi / 2), math.sin(s.chi / 2)
    c0, s0 = math.cos(s.theta0 / 2), math.sin(s.theta0 / 2)
    c1, s1 = math.cos(s.theta1 / 2), math.sin(s.theta1 / 2)
    g_plus = np.exp(0.5j * s.gamma)
    g_minus = np.exp(-0.5j * s.gamma)
    phase_sum = np.exp(0.5j * (s.phi0 + s.phi1))
    phase_diff = np.exp(0.5j * (s.phi0 - s.phi1))

    a = (cx * c0 * c1 * g_plus + sx * s0 * s1 * g_minus) / phase_sum
    b = (cx * c0 * s1 * g_plus - sx * s0 * c1 * g_minus) / phase_diff
    c = (cx * s0 * c1 * g_plus - sx * c0 * s1 * g_minus) * phase_diff
    d = (cx * s0 * s1 * g_plus + sx * c0 * c1 * g_minus) * phase_sum
    return np.array([a, b, c, d], dtype=complex)


def _check_theta(theta: float) -> float:
    if not THETA_MIN - ANGLE_TOLERANCE <= theta <= THETA_MAX + ANGLE_TOLERANCE:
        raise InvalidParameter(f"theta={theta} outside [0, pi/2]")
    return min(max(float(theta), THETA_MIN), THETA_MAX)


def theta_pair_amplitudes(theta: float) -> np.ndarray:
    """Real (a, b, c, d) on the reference slice (pi/3, pi/2, 0, theta, 0, 0)"""
    theta = _check_theta(theta)
    half_cos, half_sin = math.cos(theta / 2), math.sin(theta / 2)
    r6, r2 = math.sqrt(6.0) / 4, math.sqrt(2.0) / 4
    return np.array([
        r6 * half_cos + r2 * half_sin,
        r6 * half_sin - r2 * half_cos,
        r6 * half_cos - r2 * half_sin,
        r6 * half_sin + r2 * half_cos,
    ])


def theta_pair_ensemble(theta: float) -> List[Tuple[float, np.ndarray]]:
    """The mixture 1/2 |phi><phi| + 1/4 |Up up><Up up| + 1/4 |Down down><Down down|"""
    return [
        (0.5, theta_pair_amplitudes(theta)),
        (0.25, np.array([1.0, 0.0, 0.0, 0.0])),
        (0.25, np.array([0.0, 0.0, 0.0, 1.0])),
    ]


def build_theta_pair(theta: float) -> np.ndarray:
    """Two-qubit density matrix of the theta family"""
    return sum(weight * np.outer(v, v.conj()) for weight, v in theta_pair_ensemble(theta))


def dicke_vector(n_spins: int, k: int) -> np.ndarray:
    """
    Symmetric n-spin state with k spins down, in the 2^n tensor basis

    Raises:
        InvalidParameter: If k is outside [0, n]
    """
    if not 0 <= k <= n_spins:
        raise InvalidParameter(f"Dicke state needs 0 <= k <= {n_spins}, got {k}")
    mask = np.array([bin(i).count("1") == k for i in range(2 ** n_spins)], dtype=float)
    return mask / math.sqrt(math.comb(n_spins, k))


def _check_full_size(n_bath: int) -> None:
    if n_bath > FULL_STATE_MAX_BATH:
        raise TooLarge(f"Full basis for N={n_bath} exceeds the N <= {FULL_STATE_MAX_BATH} guard")


def build_full_state(spec: InitialStateSpec) -> StateEnsemble:
    """
    Initial state in the 2^(N+1) tensor basis, central spin most significant

    Pure families give a single-component ensemble; the theta family gives
    three components weighted (1/2, 1/4, 1/4).

    Raises:
        TooLarge: If N exceeds FULL_STATE_MAX_BATH
    """
    n = spec.n_bath
    _check_full_size(n)
    family = spec.family

    if family is StateFamily.PRODUCT_BATH:
        return StateEnsemble.pure(np.kron(QUBIT[DOWN], dicke_vector(n, 0)))
    if family is StateFamily.GHZ_BATH:
        ghz = (dicke_vector(n, 0) + dicke_vector(n, n)) / math.sqrt(2.0)
        return StateEnsemble.pure(np.kron(QUBIT[DOWN], ghz))
    if family is StateFamily.W_BATH:
        return StateEnsemble.pure(np.kron(QUBIT[DOWN], dicke_vector(n, 1)))

    polarized = dicke_vector(n - 1, 0)
    if family is StateFamily.MAX_ENTANGLED_PAIR:
        return StateEnsemble.pure(np.kron(SINGLET_LIKE_PAIR, polarized))
    return StateEnsemble(components=tuple(
        (weight, np.kron(pair, polarized)) for weight, pair in theta_pair_ensemble(spec.theta)
    ))


def build_sector_state(spec: InitialStateSpec) -> StateEnsemble:
    """
    Initial state in the collective sector basis

    Bath-only families use the fully symmetric layout; pair families
    distinguish the first bath spin.
    """
    n = spec.n_bath
    family = spec.family
    bath = SectorLayout.SYMMETRIC_BATH

    if family is StateFamily.PRODUCT_BATH:
        return StateEnsemble.pure(SectorState.from_labels(bath, n, {(DOWN, 0): 1.0}))
    if family is StateFamily.GHZ_BATH:
        amplitude = 1.0 / math.sqrt(2.0)
        return StateEnsemble.pure(
            SectorState.from_labels(bath, n, {(DOWN, 0): amplitude, (DOWN, n): amplitude})
        )
    if family is StateFamily.W_BATH:
        return StateEnsemble.pure(SectorState.from_labels(bath, n, {(DOWN, 1): 1.0}))

    def pair_state(pair: np.ndarray) -> SectorState:
        amplitudes = {(code >> 1, code & 1, 0): pair[code] for code in range(4) if pair[code] != 0}
        return SectorState.from_labels(SectorLayout.PAIR_PLUS_SYMMETRIC, n, amplitudes)

    if family is StateFamily.MAX_ENTANGLED_PAIR:
        return StateEnsemble.pure(pair_state(SINGLET_LIKE_PAIR))
    return StateEnsemble(components=tuple(
        (weight, pair_state(pair)) for weight, pair in theta_pair_ensemble(spec.theta)
    ))


def sector_to_full(state: SectorState) -> np.ndarray:
    """
    Embed a sector state in the full tensor basis

    Raises:
        TooLarge: If N exceeds FULL_STATE_MAX_BATH
    """
    _check_full_size(state.n_bath)
    basis = state.basis
    dicke_spins = basis.dicke_spins
    full = np.zeros(2 ** (state.n_bath + 1), dtype=complex)
    for label, amplitude in zip(basis.labels, state.amplitudes):
        if amplitude == 0:
            continue
        *qubits, k = label
        vector = dicke_vector(dicke_spins, k)
        for q in reversed(qubits):
            vector = np.kron(QUBIT[q], vector)
        full += amplitude * vector
    return full
