"""
Quantum-information measures
Fidelity, coherence, concurrence, binary entropy and Bloch-vector conversion
"""
import math
from typing import Sequence

import numpy as np

from src.core.errors import (
    ConsistencyError,
    DimensionMismatch,
    InvalidDensityMatrix,
    InvalidParameter,
    NotNormalized,
    NotPSD,
)
from src.core.qmath import (
    NORM_TOLERANCE,
    clean_spectrum,
    density_spectrum,
    hermitian_eigen,
    psd_sqrt,
    shannon_entropy_bits,
    von_neumann_entropy,
)
from src.models.records import BlochVector

FIDELITY_SELF_CHECK_TOLERANCE = 1e-8
COHERENCE_ZERO_TOLERANCE = 1e-12
CONCURRENCE_DUST = 1e-12
BLOCH_LENGTH_TOLERANCE = 1e-10

# sigma_y (x) sigma_y in the |00>, |01>, |10>, |11> basis
SPIN_FLIP = np.array([
    [0, 0, 0, -1],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [-1, 0, 0, 0],
], dtype=float)


def fidelity(rho_a: Sequence, rho_b: Sequence) -> float:
    """
    Uhlmann fidelity (Tr sqrt(sqrt(rho_a) rho_b sqrt(rho_a)))^2

    Qubit inputs are also evaluated through Tr(rho_a rho_b) + 2 sqrt(det rho_a det rho_b)
    and the two values must agree.

    Args:
        rho_a: Reference density matrix
        rho_b: Compared density matrix of the same dimension

    Returns:
        Fidelity in [0, 1]

    Raises:
        InvalidDensityMatrix: If either input is not a density matrix
        DimensionMismatch: If dimensions differ
        ConsistencyError: If the two qubit routes disagree beyond FIDELITY_SELF_CHECK_TOLERANCE
    """
    a, spectrum_a = density_spectrum(rho_a)
    b, spectrum_b = density_spectrum(rho_b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"Fidelity of {a.shape} and {b.shape} matrices")

    # Tr sqrt(sqrt(a) b sqrt(a)) is the trace norm of sqrt(a) sqrt(b)
    overlap = psd_sqrt(a) @ psd_sqrt(b)
    value = float(np.sum(np.linalg.svd(overlap, compute_uv=False)) ** 2)

    if a.shape == (2, 2):
        det_a = float(np.prod(clean_spectrum(spectrum_a.eigenvalues)))
        det_b = float(np.prod(clean_spectrum(spectrum_b.eigenvalues)))
        closed = float(np.trace(a @ b).real) + 2.0 * math.sqrt(det_a * det_b)
        if abs(closed - value) > FIDELITY_SELF_CHECK_TOLERANCE:
            raise ConsistencyError(
                f"Qubit fidelity routes disagree: general {value:.15g}, closed form {closed:.15g}"
            )
    return min(max(value, 0.0), 1.0)


def relative_entropy_of_coherence(rho: Sequence) -> float:
    """
    S(diag(rho)) - S(rho) in bits

    Exactly zero when every off-diagonal element is within COHERENCE_ZERO_TOLERANCE.
    """
    matrix, _ = density_spectrum(rho)
    off_diagonal = matrix - np.diag(np.diag(matrix))
    if float(np.max(np.abs(off_diagonal))) <= COHERENCE_ZERO_TOLERANCE:
        return 0.0
    diagonal_entropy = shannon_entropy_bits(np.real(np.diag(matrix)))
    return max(diagonal_entropy - von_neumann_entropy(matrix), 0.0)


def purity(rho: Sequence) -> float:
    """Tr(rho^2)"""
    matrix, _ = density_spectrum(rho)
    return float(np.real(np.trace(matrix @ matrix)))


def concurrence_pure(psi: Sequence) -> float:
    """
    Concurrence sqrt(2(1 - Tr rho_0^2)) of a two-qubit pure state

    Evaluated as 2|ad - bc|, which equals the purity form identically and
    keeps product states at exactly zero.

    Raises:
        NotNormalized: If psi is not a unit 4-vector
    """
    vector = np.asarray(psi, dtype=complex).reshape(-1)
    if vector.shape[0] != 4:
        raise NotNormalized(f"Expected a two-qubit state of length 4, got {vector.shape[0]}")
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise NotNormalized(f"State norm {norm:.12g} is not 1")
    a, b, c, d = vector
    return min(2.0 * abs(a * d - b * c), 1.0)


def spin_flipped(rho: np.ndarray) -> np.ndarray:
    """(sigma_y x sigma_y) rho* (sigma_y x sigma_y)"""
    return SPIN_FLIP @ rho.conj() @ SPIN_FLIP


def concurrence_mixed(rho: Sequence) -> float:
    """
    Wootters concurrence of a two-qubit density matrix

    The lambda_i are square roots of the eigenvalues of the Hermitian matrix
    sqrt(rho) rho~ sqrt(rho); eigenvalues below CONCURRENCE_DUST count as zero.

    Raises:
        InvalidDensityMatrix: If rho is not a valid 4x4 density matrix
    """
    matrix, _ = density_spectrum(rho)
    if matrix.shape != (4, 4):
        raise InvalidDensityMatrix(f"Concurrence needs a 4x4 density matrix, got {matrix.shape}")
    root = psd_sqrt(matrix)
    product = root @ spin_flipped(matrix) @ root
    eigenvalues = hermitian_eigen(0.5 * (product + product.conj().T)).eigenvalues
    eigenvalues = np.where(eigenvalues < CONCURRENCE_DUST, 0.0, eigenvalues)
    lambdas = np.sort(np.sqrt(eigenvalues))[::-1]
    value = float(lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3])
    return min(max(value, 0.0), 1.0)


def binary_entropy(x: float) -> float:
    """
    H_b(x) = -x log2 x - (1-x) log2(1-x)

    Raises:
        InvalidParameter: If x is outside [0, 1]
    """
    if not 0.0 <= x <= 1.0:
        raise InvalidParameter(f"Binary entropy argument {x} outside [0, 1]")
    return shannon_entropy_bits([x, 1.0 - x])


def bloch_from_rho(rho: Sequence) -> BlochVector:
    """Bloch vector of a qubit density matrix, rho = (I + r.sigma)/2"""
    matrix, _ = density_spectrum(rho)
    if matrix.shape != (2, 2):
        raise InvalidDensityMatrix(f"Bloch vector needs a 2x2 density matrix, got {matrix.shape}")
    x = 2.0 * float(matrix[0, 1].real)
    y = -2.0 * float(matrix[0, 1].imag)
    z = float((matrix[0, 0] - matrix[1, 1]).real)
    r = math.sqrt(x * x + y * y + z * z)
    if r < 1e-15:
        return BlochVector(r=0.0, theta=0.0, phi=0.0)
    theta = math.acos(min(max(z / r, -1.0), 1.0))
    phi = math.atan2(y, x) % (2.0 * math.pi)
    return BlochVector(r=r, theta=theta, phi=phi)


def rho_from_bloch(b: BlochVector) -> np.ndarray:
    """
    Qubit density matrix (I + r.sigma)/2

    Raises:
        NotPSD: If the Bloch length exceeds 1
    """
    if b.r > 1.0 + BLOCH_LENGTH_TOLERANCE:
        raise NotPSD(f"Bloch length {b.r} exceeds 1")
    x, y, z = b.cartesian()
    return 0.5 * np.array([[1.0 + z, x - 1j * y], [x + 1j * y, 1.0 - z]], dtype=complex)
