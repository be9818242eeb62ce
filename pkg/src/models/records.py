"""
Simulation records
Bloch vectors, reduced density matrices, state ensembles and time series
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import DimensionMismatch, InvalidParameter

SERIES_COLUMNS = ('t', 'F0', 'C0', 'C1', 'E01')


@dataclass(frozen=True)
class BlochVector:
    """
    Single-qubit Bloch vector in spherical coordinates

    Attributes:
        r: Length (1 for pure states)
        theta: Polar angle in [0, pi]
        phi: Azimuthal angle in [0, 2pi)
    """
    r: float
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.r, self.theta, self.phi)):
            raise InvalidParameter("Bloch vector components must be finite")
        if self.r < 0.0:
            raise InvalidParameter(f"Bloch length must be non-negative, got {self.r}")
        if not 0.0 <= self.theta <= math.pi:
            raise InvalidParameter(f"Polar angle {self.theta} outside [0, pi]")

    def cartesian(self) -> np.ndarray:
        return self.r * np.array([
            math.sin(self.theta) * math.cos(self.phi),
            math.sin(self.theta) * math.sin(self.phi),
            math.cos(self.theta),
        ])

    def to_dict(self) -> Dict[str, float]:
        return {'r': self.r, 'theta': self.theta, 'phi': self.phi}


def _matrix_to_json(matrix: np.ndarray) -> List[List[List[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)]


@dataclass
class ReducedStates:
    """
    Reduced density matrices at one time

    Attributes:
        rho_0: Central spin (2x2)
        rho_1: First bath spin (2x2)
        rho_01: Central spin plus first bath spin (4x4)
        rho_2: Second bath spin (2x2), None when N < 2
    """
    rho_0: np.ndarray
    rho_1: np.ndarray
    rho_01: np.ndarray
    rho_2: Optional[np.ndarray] = None

    def matrices(self) -> Dict[str, np.ndarray]:
        """Present matrices keyed by name"""
        found = {'rho_0': self.rho_0, 'rho_01': self.rho_01, 'rho_1': self.rho_1}
        if self.rho_2 is not None:
            found['rho_2'] = self.rho_2
        return found

    def distance(self, other: 'ReducedStates') -> float:
        """Largest Frobenius distance over matrices present in both records"""
        mine = self.matrices()
        theirs = other.matrices()
        shared = [name for name in mine if name in theirs]
        return max(float(np.linalg.norm(mine[name] - theirs[name])) for name in shared)

    @staticmethod
    def mix(weighted: Sequence[Tuple[float, 'ReducedStates']]) -> 'ReducedStates':
        """Convex combination of reduced records"""
        if not weighted:
            raise DimensionMismatch("Cannot mix an empty ensemble")

        def combine(name: str) -> Optional[np.ndarray]:
            parts = [(w, getattr(r, name)) for w, r in weighted]
            if any(m is None for _, m in parts):
                return None
            return sum(w * m for w, m in parts)

        return ReducedStates(
            rho_0=combine('rho_0'),
            rho_1=combine('rho_1'),
            rho_01=combine('rho_01'),
            rho_2=combine('rho_2')
        )

    def to_dict(self) -> Dict[str, Any]:
        return {name: _matrix_to_json(m) for name, m in self.matrices().items()}


@dataclass(frozen=True)
class StateEnsemble:
    """
    Convex mixture of pure states

    Pure families are a single component with weight 1. Components are
    whatever state representation the producing engine uses.
    """
    components: Tuple[Tuple[float, Any], ...]

    def __post_init__(self):
        if not self.components:
            raise DimensionMismatch("Ensemble needs at least one component")
        total = sum(w for w, _ in self.components)
        if abs(total - 1.0) > 1e-12:
            raise InvalidParameter(f"Ensemble weights sum to {total}, not 1")

    @classmethod
    def pure(cls, state: Any) -> 'StateEnsemble':
        return cls(components=((1.0, state),))

    @property
    def is_pure(self) -> bool:
        return len(self.components) == 1

    @property
    def weights(self) -> Tuple[float, ...]:
        return tuple(w for w, _ in self.components)

    def pure_state(self) -> Any:
        """The single component of a pure ensemble"""
        if not self.is_pure:
            raise InvalidParameter("Ensemble is a mixture; no single pure state")
        return self.components[0][1]


@dataclass
class TimeSeries:
    """
    Sampled dynamics of one initial state

    Attributes:
        t: Sample times
        f0: Fidelity of the central spin to its initial state
        c0: Relative entropy of coherence of the central spin (bits)
        c1: Relative entropy of coherence of the first bath spin (bits)
        e01: Concurrence between central spin and first bath spin
        metadata: N, state spec and engine
        window_flags: Per-column sign of (value - value at t=0), filled by sweeps
    """
    t: np.ndarray
    f0: np.ndarray
    c0: np.ndarray
    c1: np.ndarray
    e01: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)
    window_flags: Dict[str, List[int]] = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(self.t), len(self.f0), len(self.c0), len(self.c1), len(self.e01)}
        if len(lengths) != 1:
            raise DimensionMismatch(f"Time series columns have differing lengths {sorted(lengths)}")

    def __len__(self) -> int:
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        mapping = {'t': self.t, 'F0': self.f0, 'C0': self.c0, 'C1': self.c1, 'E01': self.e01}
        if name not in mapping:
            raise KeyError(f"Unknown column '{name}'")
        return mapping[name]

    def rows(self) -> List[Tuple[float, ...]]:
        return [
            tuple(float(self.column(name)[i]) for name in SERIES_COLUMNS)
            for i in range(len(self))
        ]

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {name: [float(v) for v in self.column(name)] for name in SERIES_COLUMNS}
        data['metadata'] = dict(self.metadata)
        if self.window_flags:
            data['window_flags'] = {k: list(v) for k, v in self.window_flags.items()}
        return data
