"""
Closed-form evaluators
Fidelity curves, coherence approximations, spectrum and the theta-family matrix-element tables
"""
import logging
import math
from enum import Enum
from typing import Union

import numpy as np

from src.core.errors import InvalidParameter, InvalidQuantumNumbers, SingularN, UnsupportedFamily
from src.core.measures import binary_entropy
from src.core.qmath import hermitian_eigen
from src.core.states import theta_pair_amplitudes
from src.models.state_spec import StateFamily

logger = logging.getLogger(__name__)

APPENDIX_PSD_TOLERANCE = 1e-8
APPENDIX_MIN_BATH = 3

ArrayLike = Union[float, np.ndarray]


class ClosedFormId(Enum):
    """Every closed-form expression the evaluators expose"""
    A11 = "A11"
    F_P = "F_P"
    F_GHZ = "F_GHZ"
    F_W = "F_W"
    F_EP = "F_EP"
    LAMBDA = "LAMBDA"
    C0_APPROX = "C0_APPROX"
    LAMBDA_PRIME = "LAMBDA_PRIME"
    C1_APPROX = "C1_APPROX"
    RHO01_THETA = "RHO01_THETA"
    RHO2_THETA = "RHO2_THETA"
    EIGVALS = "EIGVALS"


FIDELITY_FORMS = {
    StateFamily.PRODUCT_BATH: ClosedFormId.F_P,
    StateFamily.GHZ_BATH: ClosedFormId.F_GHZ,
    StateFamily.W_BATH: ClosedFormId.F_W,
    StateFamily.MAX_ENTANGLED_PAIR: ClosedFormId.F_EP,
}


class EnergyBranch(Enum):
    """s_tot = s_b + 1/2 (UPPER, energy s_b) or s_b - 1/2 (LOWER, energy -s_b - 1)"""
    UPPER = "upper"
    LOWER = "lower"


def _check_bath(family: StateFamily, n_bath: int) -> None:
    if n_bath < family.min_bath:
        raise InvalidParameter(f"{family.value} requires N >= {family.min_bath}, got {n_bath}")


def _scalar_or_array(values: np.ndarray, t: ArrayLike) -> ArrayLike:
    return float(values) if np.ndim(t) == 0 else values


def eval_a11(n_bath: int, t: ArrayLike) -> ArrayLike:
    """Excited-state population 2N[1 - cos((N+1)t)]/(N+1)^2 of the central spin"""
    values = 2.0 * n_bath * (1.0 - np.cos((n_bath + 1) * np.asarray(t, dtype=float))) / (n_bath + 1) ** 2
    return _scalar_or_array(values, t)


def eval_fidelity_closed(family: Union[str, StateFamily], n_bath: int, t: ArrayLike) -> ArrayLike:
    """
    Central-spin fidelity of a pure-state family

    Args:
        family: Product, GHZ, W or entangled-pair family
        n_bath: Bath size N
        t: Time or array of times

    Returns:
        Fidelity with the same shape as t

    Raises:
        UnsupportedFamily: For the theta family
    """
    family = StateFamily.parse(family)
    if family not in FIDELITY_FORMS:
        raise UnsupportedFamily(f"No closed-form fidelity for the {family.value} family")
    _check_bath(family, n_bath)

    n = n_bath
    oscillation = np.cos((n + 1) * np.asarray(t, dtype=float)) - 1.0
    if family is StateFamily.PRODUCT_BATH:
        values = 1.0 + 2.0 * n / (n + 1) ** 2 * oscillation
    elif family is StateFamily.GHZ_BATH:
        values = 1.0 + n / (n + 1) ** 2 * oscillation
    elif family is StateFamily.W_BATH:
        values = 1.0 + 4.0 * (n - 1) / (n + 1) ** 2 * oscillation
    else:
        x = 2.0 * (n - 1) * oscillation / (n + 1) ** 2
        values = 0.5 + np.sqrt(np.clip(0.25 - x * x, 0.0, None))
    return _scalar_or_array(np.clip(values, 0.0, 1.0), t)


def _check_theta(theta: float) -> None:
    if not -1e-12 <= theta <= math.pi / 2 + 1e-12:
        raise InvalidParameter(f"theta={theta} outside [0, pi/2]")


def eval_lambda(theta: float, t: ArrayLike) -> ArrayLike:
    """Larger eigenvalue of the leading-order central-spin state"""
    _check_theta(theta)
    radicand = 1.0 + (0.5 + math.cos(2 * theta)) * (1.0 - np.cos(2 * np.asarray(t, dtype=float)))
    return _scalar_or_array(0.5 + np.sqrt(np.clip(radicand, 0.0, None)) / 8.0, t)


def eval_lambda_prime(theta: float, t: ArrayLike) -> ArrayLike:
    """Larger eigenvalue of the leading-order first-bath-spin state"""
    _check_theta(theta)
    radicand = 1.5 + math.cos(2 * theta) - (0.5 + math.cos(2 * theta)) * np.cos(2 * np.asarray(t, dtype=float))
    return _scalar_or_array(0.5 + np.sqrt(np.clip(radicand, 0.0, None)) / 8.0, t)


_binary_entropy = np.vectorize(binary_entropy, otypes=[float])


def eval_coherence_closed(which: Union[str, ClosedFormId], theta: float, t: ArrayLike) -> ArrayLike:
    """
    Leading-order coherence of the central spin (C0) or the first bath spin (C1)

    C0 = 1 - H_b(lambda); C1 = H_b(1/2 + cos(theta)/8) - H_b(lambda')
    """
    key = which.value if isinstance(which, ClosedFormId) else str(which).upper()
    if key in ("C0", ClosedFormId.C0_APPROX.value):
        values = 1.0 - _binary_entropy(np.clip(eval_lambda(theta, np.asarray(t, dtype=float)), 0.0, 1.0))
    elif key in ("C1", ClosedFormId.C1_APPROX.value):
        initial = binary_entropy(0.5 + math.cos(theta) / 8.0)
        values = initial - _binary_entropy(np.clip(eval_lambda_prime(theta, np.asarray(t, dtype=float)), 0.0, 1.0))
    else:
        raise InvalidParameter(f"Unknown coherence form '{which}', expected C0 or C1")
    return _scalar_or_array(np.asarray(values, dtype=float), t)


def eval_eigenvalue(s_b: float, branch: Union[str, EnergyBranch]) -> float:
    """
    Energy s_b (upper branch) or -s_b - 1 (lower branch)

    Raises:
        InvalidQuantumNumbers: For negative or non-half-integer s_b, or the
            lower branch at s_b = 0
    """
    branch = EnergyBranch(branch) if not isinstance(branch, EnergyBranch) else branch
    doubled = round(2 * s_b)
    if s_b < 0 or abs(2 * s_b - doubled) > 1e-9:
        raise InvalidQuantumNumbers(f"Bath spin s_b={s_b} must be a non-negative half-integer")
    if branch is EnergyBranch.UPPER:
        return doubled / 2
    if doubled == 0:
        raise InvalidQuantumNumbers("s_b = 0 couples only to s_tot = 1/2; no lower branch")
    return -doubled / 2 - 1.0


def predicted_spectrum(n_bath: int) -> np.ndarray:
    """
    Ascending eigenvalues with multiplicities d(N, s_b)(2 s_tot + 1)

    d(N, s_b) = C(N, N/2 - s_b) - C(N, N/2 - s_b - 1) counts bath multiplets.
    """
    if n_bath < 1:
        raise InvalidParameter(f"Bath size must be positive, got {n_bath}")
    values = []
    for flips in range(n_bath // 2 + 1):
        s_b = n_bath / 2 - flips
        multiplets = math.comb(n_bath, flips) - (math.comb(n_bath, flips - 1) if flips else 0)
        values.extend([eval_eigenvalue(s_b, EnergyBranch.UPPER)] * int(multiplets * (2 * s_b + 2)))
        if s_b > 0:
            values.extend([eval_eigenvalue(s_b, EnergyBranch.LOWER)] * int(multiplets * 2 * s_b))
    return np.sort(np.array(values))


def _check_appendix_inputs(theta: float, n_bath: int) -> None:
    if n_bath < APPENDIX_MIN_BATH:
        raise SingularN(f"Matrix-element tables are singular for N={n_bath} (need N >= {APPENDIX_MIN_BATH})")
    _check_theta(theta)


def appendix_psd_violation(matrix: np.ndarray) -> float:
    """
    Most negative eigenvalue of an evaluated table (0 when PSD)

    Values below -APPENDIX_PSD_TOLERANCE are logged as a warning.
    """
    lowest = float(hermitian_eigen(matrix).eigenvalues[0])
    violation = min(lowest, 0.0)
    if violation < -APPENDIX_PSD_TOLERANCE:
        logger.warning("Appendix matrix is not PSD: lowest eigenvalue %.3e", violation)
    return violation


def eval_rho01_theta(theta: float, n_bath: int, t: float, check_psd: bool = True) -> np.ndarray:
    """
    Central spin plus first bath spin state of the theta family from the element tables

    Rows and columns follow |Up up>, |Up down>, |Down up>, |Down down>; the
    (3,3) element is 1 minus the other diagonals and the lower triangle is
    the conjugate of the upper one.

    Raises:
        SingularN: For N < 3
    """
    _check_appendix_inputs(theta, n_bath)
    a, b, c, d = theta_pair_amplitudes(theta)
    n = float(n_bath)
    t = float(t)

    def em(w: float) -> complex:
        return np.exp(-1j * w * t) - 1.0

    def ep(w: float) -> complex:
        return np.exp(1j * w * t) - 1.0

    def cm(w: float) -> float:
        return math.cos(w * t) - 1.0

    bc_sum = b + c
    bc_skew = b - c * n
    d2 = d * d

    d11 = (
        0.25 + a * a / 2
        - (1 + 2 * d2) * (n - 2) * cm(n - 1) / (n ** 2 * (n - 1))
        - 2 * (1 + 2 * d2) * (n - 2) / ((n + 1) * n ** 2) * (math.cos(t) - math.cos(n * t))
        + (n - 1) / ((n + 1) ** 2 * n) * (-(n - 2) / n + bc_sum * bc_skew - 2 * d2 * (n - 2) / n) * cm(n + 1)
        + (-b * bc_sum * (n - 1)) / (n * (n + 1)) * cm(1)
        + (-b * (n - 1) * bc_skew) / ((n + 1) * n ** 2) * cm(n)
    )
    d22 = (
        b * b / 2
        - (2 + d2 * (n - 2) ** 2) / (n ** 2 * (n - 1)) * cm(n - 1)
        + cm(1) / (n * (n + 1)) * (2 * (n - 2) / n + 4 * d2 * (n - 2) / n + b * bc_sum * (n - 1))
        + cm(n) / ((n + 1) * n ** 2) * (-2 * (n - 2) - 4 * d2 * (n - 2) + b * bc_skew * (n - 1))
        + 1 / ((n + 1) ** 2 * n) * (-2 * (n - 1) / n + bc_sum * bc_skew - 4 * d2 * (n - 1) / n) * cm(n + 1)
    )
    m = n + 1
    d44 = (2 * d2 + 1) / (4 * m ** 2 * n ** 2) * (
        4 * (n - 1) * math.cos(m * t)
        + (16 * m - 10 * m ** 2 + 2 * m ** 3) * math.cos(t)
        + (6 * m ** 2 - 16 * m) * math.cos(n * t)
        + (2 * m ** 3 - 6 * m ** 2) * math.cos((n - 1) * t)
        + 8 - 4 * m + 11 * m ** 2 - 6 * m ** 3 + m ** 4
    )
    d12 = (
        a * b / 2
        + a * b * (n - 1) / (2 * n) * em(1)
        + a * bc_skew / (2 * n * (n + 1)) * em(n + 1)
        + 1 / (2 * n * (n + 1) * (n - 1)) * (
            2 * b * d * (n - 1) ** 2 / n * em(n)
            + b * d * (n + 1) * (n - 1) * (n - 2) / n * em(n - 1)
            - d * bc_sum * (n - 1) * (n - 2) * em(n)
            - 2 * d * bc_sum * (n - 1) ** 2 / (n + 1) * em(n + 1)
            - 2 * b * d * (n - 1) ** 2 / n * ep(1)
            + d * (2 * b - 2 * c * n) * (n - 1) ** 2 / (n * (n + 1)) * ep(n + 1)
            + d * (n - 1) * (n - 2) * bc_skew / n * ep(n)
            + (d * bc_sum * (n - 1) * (n - 2) - d * (n - 1) * (n - 2) * bc_skew / n) * em(1)
        )
    )
    d13 = (
        a * c / 2
        - (b * d * (n - 1) ** 2 + d * bc_sum * (n - 2) * n) / (2 * (n + 1) * n ** 2) * em(n)
        + b * d * (n - 2) / (2 * n ** 2) * em(n - 1)
        - b * d * (n - 1) / ((n + 1) * n ** 2) * ep(1)
        - (a * bc_skew * n * (n + 1) - d * bc_sum * (n - 1) ** 2) / (2 * (n + 1) ** 2 * n) * em(n + 1)
        - d * bc_skew / (2 * (n + 1) * n ** 2) * ep(n)
        - d * bc_sum / (2 * n * (n + 1)) * em(1)
        + d * (n - 1) * bc_skew / ((n + 1) ** 2 * n ** 2) * ep(n + 1)
        - d * bc_skew * (n - 2) / (2 * (n + 1) * n ** 2) * ep(1)
    )
    d14 = (
        a * d / 2
        + a * d / (2 * n) * em(1)
        + a * d * (n - 2) / (2 * n) * em(n)
        + a * d * (n - 1) / (2 * n * (n + 1)) * em(n + 1)
    )
    d23 = (
        b * c / 2
        - d2 / 2 * (
            (2 + (n - 1) * (n - 2)) / ((n + 1) * n ** 2) * em(1)
            + 2 * (n - 3) / ((n + 1) * n ** 2) * ep(n)
            + 4 * (n - 1) / ((n + 1) ** 2 * n ** 2) * ep(n + 1)
            - 2 * (n - 1) ** 2 / (n ** 2 * (n + 1) ** 2) * em(n + 1)
            + 2 * (n - 2) / ((n + 1) * n ** 2) * em(n)
            - (n - 1) * (n - 2) / ((n + 1) * n ** 2) * em(n)
        )
        + (-bc_sum * bc_skew * n ** 2 + (n - 1) ** 2) / (2 * (n + 1) ** 2 * n ** 2) * em(n + 1)
        + (-b * (n - 1) * bc_skew / (2 * n * (n + 1)) + (n - 2) * (n - 3) / (4 * (n + 1) * n ** 2)) * em(n)
        + (1 + 2 * d2) * (
            (n - 2) / (4 * n ** 2 * (n - 1)) * ep(n - 1)
            + (n - 2) / ((n + 1) * n ** 2) * ep(1)
            - (n - 2) ** 2 / (4 * n ** 2 * (n - 1)) * em(n - 1)
        )
        - (n - 1) / ((n + 1) ** 2 * n ** 2) * ep(n + 1)
        - (n - 3) / (2 * (n + 1) * n ** 2) * ep(n)
        - ((n + 1) ** 2 - 5 * (n + 1) + 8) / (4 * (n + 1) * n ** 2) * em(1)
        + bc_sum * bc_skew / (2 * (n + 1) ** 2 * n) * ep(n + 1)
        + b * bc_sum * (n - 1) / (2 * n * (n + 1)) * ep(1)
    )
    d24 = (
        b * d / 2
        + d * bc_sum / (2 * n * (n + 1)) * em(1)
        + d * bc_skew / ((n + 1) ** 2 * n ** 2) * ep(n + 1)
        + d * bc_skew / (2 * (n + 1) * n ** 2) * ep(n)
        + (b * d * (n - 1) ** 2 / (2 * (n + 1) * n ** 2) + d * bc_sum * (n - 2) / (2 * n * (n + 1))) * em(n)
        + d * bc_sum * (n - 1) / (2 * (n + 1) ** 2 * n) * em(n + 1)
        + (2 * b * d * (n - 1) + d * bc_skew * (n - 2)) / (2 * (n + 1) * n ** 2) * ep(1)
        + b * d * (n - 1) * (n - 2) / (2 * n ** 2) * em(n - 1)
    )
    d34 = (
        c * d / 2
        + d * bc_sum / (2 * n * (n + 1)) * em(1)
        - d * bc_skew / ((n + 1) ** 2 * n) * ep(n + 1)
        - d * bc_skew / (2 * n * (n + 1)) * ep(n)
        + d * bc_sum * (n - 1) / (2 * (n + 1) ** 2 * n) * em(n + 1)
        + d * bc_sum * (n - 2) / (2 * n * (n + 1)) * em(n)
        - d * bc_skew * (n - 2) / (2 * n * (n + 1)) * ep(1)
    )
    d33 = 1.0 - d11 - d22 - d44

    upper = np.array([
        [d11, d12, d13, d14],
        [0.0, d22, d23, d24],
        [0.0, 0.0, d33, d34],
        [0.0, 0.0, 0.0, d44],
    ], dtype=complex)
    rho = upper + np.triu(upper, 1).conj().T
    rho[np.diag_indices(4)] = np.real(np.diag(rho))
    if check_psd:
        appendix_psd_violation(rho)
    return rho


def eval_rho2_theta(theta: float, n_bath: int, t: float, check_psd: bool = True) -> np.ndarray:
    """
    Second bath spin state of the theta family from the element tables

    Raises:
        SingularN: For N < 3
    """
    _check_appendix_inputs(theta, n_bath)
    a, b, c, d = theta_pair_amplitudes(theta)
    n = float(n_bath)
    t = float(t)

    def em(w: float) -> complex:
        return np.exp(-1j * w * t) - 1.0

    def ep(w: float) -> complex:
        return np.exp(1j * w * t) - 1.0

    def cm(w: float) -> float:
        return math.cos(w * t) - 1.0

    bc_sum = b + c
    bc_skew = b - c * n
    d2 = d * d

    e12 = (
        -b * d / ((n + 1) * n ** 2) * em(n)
        + 1 / (2 * (n + 1) * n) * (bc_skew * (a - 2 * d / (n + 1)) - d * bc_sum * (n - 1) / (n + 1)) * em(n + 1)
        + 1 / (2 * (n + 1) * n ** 2 * (n - 1)) * (d * bc_skew * (n - 2) * (n + 1) + 2 * b * d * (n - 1)) * ep(1)
        - (a * b / (2 * n) + d * bc_sum / (2 * (n + 1) * n)) * em(1)
        + d * bc_skew * (n - 1) / ((n + 1) ** 2 * n ** 2) * ep(n + 1)
        - b * d * (n + 1) * (n - 2) / (2 * n ** 2 * (n - 1)) * em(n - 1)
        + d * bc_skew / ((n + 1) * n ** 2 * (n - 1)) * ep(n)
    )
    e22 = (
        1 / ((n + 1) * n ** 2 * (n - 1)) * (
            -(1 + 2 * d2) / 2 * (n ** 2 - 3 * n + 4) - 2 * (1 + 2 * d2) * (n - 2) - b * bc_sum * n * (n - 1)
        ) * cm(1)
        + (n - 2) / (n ** 2 * (n - 1) ** 2) * (0.5 - d2 * (n + 1) - 2 * (n - 1) / (n - 2)) * cm(n - 1)
        + 1 / ((n + 1) * n ** 2 * (n - 1)) * ((n - 3) * (d2 + 0.5) - b * bc_skew * (n - 1)) * cm(n)
        + 1 / ((n + 1) ** 2 * n ** 2 * (n - 1)) * (
            -2 * (n - 1) ** 2 * (d2 + 0.5) + bc_sum * bc_skew * n * (n - 1)
        ) * cm(n + 1)
    )
    rho = np.array([[1.0 - e22, e12], [np.conj(e12), e22]], dtype=complex)
    if check_psd:
        appendix_psd_violation(rho)
    return rho
