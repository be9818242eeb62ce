"""
Amplitude scaling records
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List

from src.core.errors import InvalidParameter
from src.models.state_spec import StateFamily


@dataclass(frozen=True)
class AmplitudeSample:
    """Peak-to-trough fidelity oscillation for one (family, N)"""
    family: StateFamily
    n_bath: int
    amplitude: float

    def __post_init__(self):
        if not 0.0 <= self.amplitude <= 1.0:
            raise InvalidParameter(f"Amplitude {self.amplitude} outside [0, 1]")

    def to_dict(self) -> Dict[str, Any]:
        return {'family': self.family.value, 'N': self.n_bath, 'amplitude': self.amplitude}


@dataclass(frozen=True)
class ScalingFit:
    """
    Least-squares power law log2(amplitude) = slope * log2(N) + intercept

    Attributes:
        slope: Fitted exponent
        intercept: Fitted log2 prefactor
        r_squared: Coefficient of determination
        n_list: Bath sizes used in the fit
    """
    slope: float
    intercept: float
    r_squared: float
    n_list: List[int] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'slope': self.slope,
            'intercept': self.intercept,
            'r_squared': self.r_squared,
            'n_list': list(self.n_list)
        }
