"""
Dense complex linear algebra
Hermitian eigensolver, PSD square root, partial trace, entropy and spectral propagation
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np
from scipy.special import entr

from src.core.errors import (
    DimensionMismatch,
    InvalidDensityMatrix,
    NoConvergence,
    NonHermitianInput,
    NotNormalized,
    NotPSD,
)

logger = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-10
PSD_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-10
NORM_TOLERANCE = 1e-10
JACOBI_MAX_DIM = 64
JACOBI_OFFDIAG_TOLERANCE = 1e-14
JACOBI_MAX_SWEEPS = 100
SPECTRAL_DUST = 1e-12


@dataclass(frozen=True)
class HermitianEigenResult:
    """
    Eigendecomposition of a Hermitian matrix

    Attributes:
        eigenvalues: Real eigenvalues in ascending order
        eigenvectors: Matrix whose columns are the matching orthonormal eigenvectors
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> np.ndarray:
        """Return V diag(lambda) V^dagger"""
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def as_square_matrix(m: Sequence) -> np.ndarray:
    """
    Coerce input to a finite square numpy matrix

    Real input stays real so large real-symmetric problems keep the cheaper path.
    """
    matrix = np.asarray(m)
    if matrix.dtype.kind not in "fc":
        matrix = matrix.astype(float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise DimensionMismatch(f"Expected a non-empty square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise DimensionMismatch("Matrix contains NaN or Inf entries")
    return matrix


def hermitian_asymmetry(m: np.ndarray) -> float:
    """Largest elementwise |m - m^dagger|"""
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m: Sequence, tolerance: float = HERMITIAN_TOLERANCE) -> bool:
    return hermitian_asymmetry(as_square_matrix(m)) <= tolerance


def hermitian_eigen(m: Sequence) -> HermitianEigenResult:
    """
    Diagonalize a Hermitian matrix

    Matrices up to JACOBI_MAX_DIM use the cyclic Jacobi solver with a fixed
    sweep order; larger ones (the full-basis oracle) go through LAPACK.

    Args:
        m: Square Hermitian matrix

    Returns:
        HermitianEigenResult with ascending eigenvalues

    Raises:
        NonHermitianInput: If the asymmetry exceeds HERMITIAN_TOLERANCE
        NoConvergence: If Jacobi sweeps hit the cap
    """
    matrix = as_square_matrix(m)
    asymmetry = hermitian_asymmetry(matrix)
    if asymmetry > HERMITIAN_TOLERANCE:
        raise NonHermitianInput(f"Matrix asymmetry {asymmetry:.3e} exceeds {HERMITIAN_TOLERANCE:.0e}")
    hermitian = 0.5 * (matrix + matrix.conj().T)

    if hermitian.shape[0] > JACOBI_MAX_DIM:
        eigenvalues, eigenvectors = np.linalg.eigh(hermitian)
        return HermitianEigenResult(_frozen(eigenvalues), _frozen(eigenvectors))
    return _jacobi_eigen(hermitian)


def _off_diagonal_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    apq = a[p, q]
    magnitude = abs(apq)
    if magnitude == 0.0:
        return
    phase = apq / magnitude
    tau = (a[q, q].real - a[p, p].real) / (2.0 * magnitude)
    t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
    c = 1.0 / np.hypot(1.0, t)
    s = t * c
    # phase-align a[p, q], then a real Givens rotation
    g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
    pair = [p, q]
    a[:, pair] = a[:, pair] @ g
    a[pair, :] = g.conj().T @ a[pair, :]
    v[:, pair] = v[:, pair] @ g
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real


def _jacobi_eigen(hermitian: np.ndarray) -> HermitianEigenResult:
    a = np.array(hermitian, dtype=complex)
    dim = a.shape[0]
    v = np.eye(dim, dtype=complex)
    threshold = JACOBI_OFFDIAG_TOLERANCE * dim * max(1.0, float(np.linalg.norm(a)))

    sweeps = 0
    while _off_diagonal_norm(a) >= threshold:
        if sweeps == JACOBI_MAX_SWEEPS:
            raise NoConvergence(
                f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (dim={dim})"
            )
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                _jacobi_rotate(a, v, p, q)
        sweeps += 1
    logger.debug("Jacobi converged in %d sweeps (dim=%d)", sweeps, dim)

    eigenvalues = np.real(np.diag(a))
    order = np.argsort(eigenvalues, kind="stable")
    return HermitianEigenResult(_frozen(eigenvalues[order].copy()), _frozen(v[:, order].copy()))


def clean_spectrum(eigenvalues: Sequence[float]) -> np.ndarray:
    """Eigenvalues with every entry below SPECTRAL_DUST times the largest set to zero"""
    values = np.asarray(eigenvalues, dtype=float)
    if values.size == 0:
        return values
    cutoff = SPECTRAL_DUST * float(np.max(np.abs(values)))
    return np.where(values < cutoff, 0.0, values)


def psd_sqrt(m: Sequence) -> np.ndarray:
    """
    Principal square root of a positive semidefinite matrix

    Eigenvalues below SPECTRAL_DUST relative to the largest are treated as zero.

    Raises:
        NotPSD: If an eigenvalue is below -PSD_TOLERANCE
    """
    result = hermitian_eigen(m)
    lowest = float(result.eigenvalues[0])
    if lowest < -PSD_TOLERANCE:
        raise NotPSD(f"Eigenvalue {lowest:.3e} below {-PSD_TOLERANCE:.0e}")
    roots = np.sqrt(clean_spectrum(result.eigenvalues))
    root = (result.eigenvectors * roots) @ result.eigenvectors.conj().T
    return 0.5 * (root + root.conj().T)


def partial_trace(
    state_or_dm: Sequence,
    subsystem_dims: Sequence[int],
    keep: Iterable[int]
) -> np.ndarray:
    """
    Reduce a state vector or density matrix to the kept subsystems

    Args:
        state_or_dm: State vector (1-D) or density matrix (2-D)
        subsystem_dims: Local dimensions, first entry is the most significant index
        keep: Subsystem indices to keep; output follows ascending index order

    Returns:
        Reduced density matrix over the kept subsystems

    Raises:
        DimensionMismatch: If dims do not match the input or keep is invalid
    """
    dims = [int(d) for d in subsystem_dims]
    if not dims or any(d < 1 for d in dims):
        raise DimensionMismatch(f"Invalid subsystem dimensions {subsystem_dims}")
    kept = sorted(set(int(k) for k in keep))
    if not kept or kept[0] < 0 or kept[-1] >= len(dims):
        raise DimensionMismatch(f"Invalid keep set {sorted(keep)} for {len(dims)} subsystems")

    total = int(np.prod(dims))
    traced = [i for i in range(len(dims)) if i not in kept]
    kept_dim = int(np.prod([dims[k] for k in kept]))
    rest_dim = total // kept_dim
    data = np.asarray(state_or_dm, dtype=complex)

    if data.ndim == 1:
        if data.shape[0] != total:
            raise DimensionMismatch(f"State length {data.shape[0]} != product of dims {total}")
        tensor = np.transpose(data.reshape(dims), kept + traced).reshape(kept_dim, rest_dim)
        return tensor @ tensor.conj().T

    if data.ndim == 2 and data.shape == (total, total):
        n = len(dims)
        order = kept + traced + [n + k for k in kept] + [n + k for k in traced]
        tensor = np.transpose(data.reshape(dims + dims), order)
        tensor = tensor.reshape(kept_dim, rest_dim, kept_dim, rest_dim)
        return np.trace(tensor, axis1=1, axis2=3)

    raise DimensionMismatch(f"Input shape {data.shape} does not match dims {dims}")


def density_spectrum(rho: Sequence) -> Tuple[np.ndarray, HermitianEigenResult]:
    """
    Validate a density matrix and return it with its eigendecomposition

    Raises:
        InvalidDensityMatrix: If not Hermitian, not unit trace or not PSD
    """
    try:
        matrix = as_square_matrix(rho).astype(complex)
    except DimensionMismatch as e:
        raise InvalidDensityMatrix(str(e)) from e
    asymmetry = hermitian_asymmetry(matrix)
    if asymmetry > HERMITIAN_TOLERANCE:
        raise InvalidDensityMatrix(f"Density matrix asymmetry {asymmetry:.3e}")
    trace = complex(np.trace(matrix))
    if abs(trace - 1.0) > TRACE_TOLERANCE:
        raise InvalidDensityMatrix(f"Density matrix trace {trace:.12g} is not 1")
    matrix = 0.5 * (matrix + matrix.conj().T)
    spectrum = hermitian_eigen(matrix)
    lowest = float(spectrum.eigenvalues[0])
    if lowest < -PSD_TOLERANCE:
        raise InvalidDensityMatrix(f"Density matrix eigenvalue {lowest:.3e} is negative")
    return matrix, spectrum


def validate_density_matrix(rho: Sequence) -> np.ndarray:
    """Return the Hermitian-symmetrized density matrix or raise InvalidDensityMatrix"""
    matrix, _ = density_spectrum(rho)
    return matrix


def shannon_entropy_bits(probabilities: Sequence[float]) -> float:
    """Entropy in bits of a probability list; 0 log 0 counts as 0"""
    p = np.clip(np.asarray(probabilities, dtype=float), 0.0, None)
    return float(np.sum(entr(p)) / np.log(2.0))


def von_neumann_entropy(rho: Sequence) -> float:
    """
    Von Neumann entropy in bits

    Raises:
        InvalidDensityMatrix: If rho is not a valid density matrix
    """
    _, spectrum = density_spectrum(rho)
    entropy = shannon_entropy_bits(spectrum.eigenvalues)
    return min(max(entropy, 0.0), float(np.log2(spectrum.dim)))


def _apply(matrix: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """matrix @ vectors without promoting a real matrix to complex"""
    if np.isrealobj(matrix):
        return matrix @ vectors.real + 1j * (matrix @ vectors.imag)
    return matrix @ vectors


class SpectralPropagator:
    """
    Time evolution exp(-iHt) from a one-time eigendecomposition

    Attributes:
        spectrum: Eigendecomposition of the Hamiltonian
    """

    def __init__(self, h: Sequence):
        """
        Args:
            h: Hermitian Hamiltonian

        Raises:
            NonHermitianInput: Propagated from hermitian_eigen
        """
        self.spectrum = hermitian_eigen(h)

    @property
    def dim(self) -> int:
        return self.spectrum.dim

    def _checked_state(self, psi0: Sequence) -> np.ndarray:
        psi = np.asarray(psi0, dtype=complex)
        if psi.ndim != 1 or psi.shape[0] != self.dim:
            raise DimensionMismatch(f"State shape {psi.shape} does not match dimension {self.dim}")
        norm = float(np.linalg.norm(psi))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise NotNormalized(f"State norm {norm:.12g} is not 1")
        return psi

    def evolve_many(self, psi0: Sequence, t_grid: Sequence[float]) -> np.ndarray:
        """
        Evolve one state over a grid of times

        Returns:
            Array of shape (len(t_grid), dim), one evolved state per row
        """
        psi = self._checked_state(psi0)
        times = np.asarray(t_grid, dtype=float).reshape(-1)
        vectors = self.spectrum.eigenvectors
        coefficients = _apply(vectors.conj().T, psi)
        phases = np.exp(-1j * np.outer(times, self.spectrum.eigenvalues))
        states = _apply(vectors, (phases * coefficients).T).T
        states[times == 0.0] = psi
        return states

    def evolve(self, psi0: Sequence, t: float) -> np.ndarray:
        return self.evolve_many(psi0, [t])[0]


def evolve_spectral(h: Sequence, psi0: Sequence, t: float) -> np.ndarray:
    """Return exp(-iht) psi0"""
    return SpectralPropagator(h).evolve(psi0, t)
