"""
Simulation Orchestrator - Facade over engines and experiment services
Single entry point for the CLI and the HTTP surface
"""
import logging
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from src.core import collective, ed
from src.core.engines import Engine, compute_time_series
from src.models.records import TimeSeries
from src.models.state_spec import InitialStateSpec, StateFamily
from src.services.coherence_service import CoherenceService
from src.services.scaling_service import DEFAULT_N_LIST, ScalingService
from src.services.verification_service import (
    DEFAULT_N_RANGE,
    DEFAULT_T_POINTS,
    DEFAULT_THETA_POINTS,
    Tolerances,
    VerificationReport,
    VerificationService,
)
from src.utils.helpers import time_grid

logger = logging.getLogger(__name__)


class SimulationOrchestrator:
    """
    Simulation Orchestrator implementing the Facade pattern

    Coordinates time evolution, the scaling analysis, theta sweeps and the
    verification matrix. Library errors propagate as ValueError subclasses.
    """

    def __init__(self, workers: Optional[int] = None, tolerances: Optional[Tolerances] = None):
        """
        Initialize orchestrator with all services

        Args:
            workers: Thread pool size for sweeps
            tolerances: Verification tolerance classes
        """
        self.scaling_service = ScalingService(workers=workers)
        self.coherence_service = CoherenceService(workers=workers)
        self.verification_service = VerificationService(tolerances)
        self.last_verification: Optional[VerificationReport] = None

    def evolve(
        self,
        family: Union[str, StateFamily],
        n_bath: int,
        t_max: float,
        steps: int,
        theta: Optional[float] = None,
        engine: Union[str, Engine] = Engine.COLLECTIVE
    ) -> TimeSeries:
        """
        Time series of one initial state

        Args:
            family: State family
            n_bath: Bath size N
            t_max: Final time
            steps: Number of samples from 0 to t_max inclusive
            theta: Angle for the theta family
            engine: 'ed' or 'collective'
        """
        spec = InitialStateSpec(family, n_bath, theta)
        return compute_time_series(spec, time_grid(t_max, steps), engine)

    def run_scaling(
        self,
        families: Iterable[Union[str, StateFamily]],
        n_list: Iterable[int] = DEFAULT_N_LIST
    ) -> Dict[str, Any]:
        return self.scaling_service.run(families, n_list)

    def run_coherence_sweep(
        self,
        n_bath: int,
        theta_list: Sequence[float],
        t_max: float,
        steps: int
    ) -> List[TimeSeries]:
        """Theta sweep on a uniform grid; see CoherenceService.coherence_sweep"""
        return self.coherence_service.coherence_sweep(n_bath, theta_list, time_grid(t_max, steps))

    def run_verification(
        self,
        n_range: Iterable[int] = DEFAULT_N_RANGE,
        t_points: int = DEFAULT_T_POINTS,
        theta_points: int = DEFAULT_THETA_POINTS,
        thetas: Optional[Sequence[float]] = None
    ) -> VerificationReport:
        report = self.verification_service.run_verification(n_range, t_points, theta_points, thetas)
        self.last_verification = report
        return report

    def get_system_status(self) -> Dict[str, Any]:
        """
        Get system status

        Returns:
            Dictionary with engine limits, cache usage and the last verification summary
        """
        propagators = collective.block_propagator.cache_info()
        return {
            'engines': [e.value for e in Engine],
            'families': [f.value for f in StateFamily],
            'limits': {
                'ed_max_bath': ed.ED_MAX_BATH,
            },
            'cached_block_propagators': propagators.currsize,
            'verification': (
                self.last_verification.get_summary() if self.last_verification is not None else None
            )
        }
