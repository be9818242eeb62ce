"""
Verification Service - three-way consistency matrix
Compares the exact-diagonalization oracle, the collective engine and the
closed forms, and audits the theta-family matrix-element tables
"""
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.core import collective, ed
from src.core.analytic import (
    FIDELITY_FORMS,
    appendix_psd_violation,
    eval_fidelity_closed,
    eval_rho01_theta,
    eval_rho2_theta,
)
from src.core.errors import InvalidParameter
from src.core.measures import fidelity
from src.models.records import ReducedStates
from src.models.state_spec import THETA_MAX, InitialStateSpec, StateFamily
from src.utils.helpers import format_report, time_grid

logger = logging.getLogger(__name__)

VERIFY_MIN_BATH = 3
VERIFY_MAX_BATH = ed.ED_MAX_BATH
DEFAULT_N_RANGE = tuple(range(3, 11))
DEFAULT_T_POINTS = 50
DEFAULT_THETA_POINTS = 5
APPENDIX_N_RANGE = tuple(range(4, 11))
APPENDIX_THETAS = (0.0, 0.7, math.pi / 3, math.pi / 2)
APPENDIX_T_POINTS = 25
DIAGONAL_ELEMENTS = ('D11', 'D22', 'D33', 'D44', 'E22')
VERIFY_T_MAX = 2.0 * math.pi

# element name -> (matrix, row, column)
APPENDIX_ELEMENTS: Dict[str, Tuple[str, int, int]] = {
    'D11': ('rho_01', 0, 0),
    'D22': ('rho_01', 1, 1),
    'D33': ('rho_01', 2, 2),
    'D44': ('rho_01', 3, 3),
    'D12': ('rho_01', 0, 1),
    'D13': ('rho_01', 0, 2),
    'D14': ('rho_01', 0, 3),
    'D23': ('rho_01', 1, 2),
    'D24': ('rho_01', 1, 3),
    'D34': ('rho_01', 2, 3),
    'E12': ('rho_2', 0, 1),
    'E22': ('rho_2', 1, 1),
}


class VerificationStatus(Enum):
    """Comparison outcome"""
    PASSED = "passed"
    FAILED = "failed"
    SKIPPED = "skipped"
    ERROR = "error"


class CheckKind(Enum):
    """Which pair of methods a comparison covers"""
    ED_COLLECTIVE = "ed_collective"
    ED_ANALYTIC = "ed_analytic"
    COLLECTIVE_ANALYTIC = "collective_analytic"


@dataclass
class Tolerances:
    """Tolerance class per comparison kind"""
    ed_collective: float = 1e-10
    ed_analytic: float = 1e-10
    collective_analytic: float = 1e-10
    appendix: float = 1e-8

    def for_check(self, check: CheckKind) -> float:
        return getattr(self, check.value)

    def to_dict(self) -> Dict[str, float]:
        return {
            'ed_collective': self.ed_collective,
            'ed_analytic': self.ed_analytic,
            'collective_analytic': self.collective_analytic,
            'appendix': self.appendix
        }


class ComparisonResult:
    """
    Result of one comparison

    Attributes:
        check: Compared pair of methods
        family: Initial state family
        n_bath: Bath size
        theta: Angle for the theta family, otherwise None
        max_deviation: Largest deviation over the time grid
        tolerance: Tolerance class applied
        status: Outcome
        message: Details or error text
        duration: Execution duration in seconds
    """

    def __init__(
        self,
        check: CheckKind,
        family: StateFamily,
        n_bath: int,
        theta: Optional[float],
        max_deviation: Optional[float],
        tolerance: float,
        status: VerificationStatus,
        message: str = "",
        duration: float = 0.0
    ):
        self.check = check
        self.family = family
        self.n_bath = n_bath
        self.theta = theta
        self.max_deviation = max_deviation
        self.tolerance = tolerance
        self.status = status
        self.message = message
        self.duration = duration
        self.timestamp = datetime.now()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'check': self.check.value,
            'family': self.family.value,
            'N': self.n_bath,
            'theta': self.theta,
            'max_deviation': self.max_deviation,
            'tolerance': self.tolerance,
            'status': self.status.value,
            'message': self.message,
            'duration': self.duration,
            'timestamp': self.timestamp.isoformat()
        }


@dataclass
class ErratumEntry:
    """
    Audit of one theta-family matrix element against the exact oracle

    Attributes:
        element: Table name (D11 ... D34, E12, E22)
        max_deviation: Largest deviation seen
        first_failure: (theta, N, t) of the first deviation above tolerance
        samples: Number of points compared
    """
    element: str
    max_deviation: float = 0.0
    first_failure: Optional[Tuple[float, int, float]] = None
    samples: int = 0

    @property
    def certified(self) -> bool:
        return self.samples > 0 and self.first_failure is None

    def record(self, deviation: float, location: Tuple[float, int, float], tolerance: float) -> None:
        self.samples += 1
        self.max_deviation = max(self.max_deviation, deviation)
        if deviation > tolerance and self.first_failure is None:
            self.first_failure = location

    def to_dict(self) -> Dict[str, Any]:
        failure = None
        if self.first_failure is not None:
            theta, n, t = self.first_failure
            failure = {'theta': theta, 'N': n, 't': t}
        return {
            'element': self.element,
            'max_deviation': self.max_deviation,
            'first_failure': failure,
            'certified': self.certified,
            'samples': self.samples
        }


@dataclass
class VerificationReport:
    """
    Consistency matrix plus the matrix-element audit

    Appendix entries are informational and never change the exit code.
    """
    n_range: List[int] = field(default_factory=list)
    tolerances: Tolerances = field(default_factory=Tolerances)
    comparisons: List[ComparisonResult] = field(default_factory=list)
    appendix: Dict[str, ErratumEntry] = field(default_factory=dict)
    psd_min: float = 0.0

    def get_summary(self) -> Dict[str, Any]:
        counts = {status: 0 for status in VerificationStatus}
        for result in self.comparisons:
            counts[result.status] += 1
        total = len(self.comparisons)
        passed = counts[VerificationStatus.PASSED]
        success_rate = (passed / total * 100) if total > 0 else 0.0
        return {
            'total': total,
            'passed': passed,
            'failed': counts[VerificationStatus.FAILED],
            'skipped': counts[VerificationStatus.SKIPPED],
            'error': counts[VerificationStatus.ERROR],
            'success_rate': round(success_rate, 2)
        }

    @property
    def exit_code(self) -> int:
        breach = any(
            r.status in {VerificationStatus.FAILED, VerificationStatus.ERROR}
            for r in self.comparisons
        )
        return 1 if breach else 0

    def certified_elements(self) -> List[str]:
        """Audited table elements with no deviation above tolerance"""
        return [name for name, entry in self.appendix.items() if entry.certified]

    def max_deviation(self, check: CheckKind) -> float:
        values = [
            r.max_deviation for r in self.comparisons
            if r.check is check and r.max_deviation is not None
        ]
        return max(values) if values else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_range': list(self.n_range),
            'tolerances': self.tolerances.to_dict(),
            'summary': self.get_summary(),
            'exit_code': self.exit_code,
            'comparisons': [r.to_dict() for r in self.comparisons],
            'appendix': {name: entry.to_dict() for name, entry in self.appendix.items()},
            'appendix_certified': self.certified_elements(),
            'appendix_psd_min': self.psd_min
        }

    def format_text(self) -> str:
        """Human-readable report"""
        worst = {check.value: self.max_deviation(check) for check in CheckKind}
        problems: Dict[str, Any] = {}
        for r in self.comparisons:
            if r.status is not VerificationStatus.PASSED:
                key = f"{r.check.value} {r.family.value} N={r.n_bath}"
                if r.theta is not None:
                    key += f" theta={r.theta:.6f}"
                problems[key] = f"{r.status.value}: {r.message}"
        appendix = {
            name: f"max {entry.max_deviation:.3e}, "
                  + ("certified" if entry.certified else f"first failure {entry.first_failure}")
            for name, entry in self.appendix.items()
        }
        data: Dict[str, Any] = {
            'n_range': list(self.n_range),
            'summary': self.get_summary(),
            'max_deviation': worst,
            'breaches': problems if problems else 'none',
            'appendix': appendix if appendix else 'not run',
            'appendix_psd_min': self.psd_min,
            'exit_code': self.exit_code
        }
        return format_report(data, title="Verification Report")


def _fidelity_curve(records: List[ReducedStates]) -> np.ndarray:
    """Fidelity of rho_0 to its value at the first grid time"""
    initial = records[0].rho_0
    return np.array([fidelity(initial, r.rho_0) for r in records])


def _max_distance(first: List[ReducedStates], second: List[ReducedStates]) -> float:
    return max(a.distance(b) for a, b in zip(first, second))


class VerificationService:
    """
    Cross-validation of the simulation engines

    Every comparison is recorded as a ComparisonResult; exceptions become
    ERROR results instead of propagating.
    """

    def __init__(self, tolerances: Optional[Tolerances] = None):
        """
        Initialize the verification service

        Args:
            tolerances: Tolerance classes (defaults if not provided)
        """
        self.tolerances = tolerances if tolerances is not None else Tolerances()

    def _compare(
        self,
        report: VerificationReport,
        check: CheckKind,
        spec: InitialStateSpec,
        compute: Callable[[], float]
    ) -> ComparisonResult:
        tolerance = self.tolerances.for_check(check)
        start_time = datetime.now()
        deviation: Optional[float] = None
        try:
            deviation = float(compute())
            if deviation <= tolerance:
                status = VerificationStatus.PASSED
                message = "Within tolerance"
            else:
                status = VerificationStatus.FAILED
                message = f"Deviation {deviation:.3e} exceeds {tolerance:.1e}"
        except Exception as e:
            status = VerificationStatus.ERROR
            message = f"Error during comparison: {str(e)}"
            logger.warning("%s comparison for %s raised: %s", check.value, spec.label, e)
        duration = (datetime.now() - start_time).total_seconds()

        result = ComparisonResult(
            check=check,
            family=spec.family,
            n_bath=spec.n_bath,
            theta=spec.theta,
            max_deviation=deviation,
            tolerance=tolerance,
            status=status,
            message=message,
            duration=duration
        )
        report.comparisons.append(result)
        return result

    def _audit_appendix(
        self,
        report: VerificationReport,
        spec: InitialStateSpec,
        t_grid: np.ndarray,
        records: List[ReducedStates]
    ) -> None:
        for t, record in zip(t_grid, records):
            analytic = {
                'rho_01': eval_rho01_theta(spec.theta, spec.n_bath, float(t), check_psd=False),
                'rho_2': eval_rho2_theta(spec.theta, spec.n_bath, float(t), check_psd=False),
            }
            report.psd_min = min(
                report.psd_min,
                appendix_psd_violation(analytic['rho_01']),
                appendix_psd_violation(analytic['rho_2'])
            )
            exact = {'rho_01': record.rho_01, 'rho_2': record.rho_2}
            location = (spec.theta, spec.n_bath, float(t))
            for name, (matrix, row, col) in APPENDIX_ELEMENTS.items():
                deviation = abs(exact[matrix][row, col] - analytic[matrix][row, col])
                report.appendix.setdefault(name, ErratumEntry(name)).record(
                    float(deviation), location, self.tolerances.appendix
                )

    def verify_spec(self, report: VerificationReport, spec: InitialStateSpec, t_grid: np.ndarray) -> None:
        """All comparisons available for one initial state"""
        records: Dict[str, List[ReducedStates]] = {}

        def compare_engines() -> float:
            records['ed'] = ed.evolve_and_reduce(spec, t_grid)
            records['collective'] = collective.evolve_and_reduce(spec, t_grid)
            return _max_distance(records['ed'], records['collective'])

        self._compare(report, CheckKind.ED_COLLECTIVE, spec, compare_engines)

        if spec.family in FIDELITY_FORMS:
            closed = np.asarray(eval_fidelity_closed(spec.family, spec.n_bath, t_grid))
            for check, engine in ((CheckKind.ED_ANALYTIC, 'ed'), (CheckKind.COLLECTIVE_ANALYTIC, 'collective')):
                if engine in records:
                    self._compare(
                        report, check, spec,
                        lambda engine=engine: np.max(np.abs(_fidelity_curve(records[engine]) - closed))
                    )

        if spec.family is StateFamily.THETA_FAMILY and 'ed' in records:
            self._audit_appendix(report, spec, t_grid, records['ed'])

    def run_verification(
        self,
        n_range: Iterable[int] = DEFAULT_N_RANGE,
        t_points: int = DEFAULT_T_POINTS,
        theta_points: int = DEFAULT_THETA_POINTS,
        thetas: Optional[Sequence[float]] = None
    ) -> VerificationReport:
        """
        Run the consistency matrix over bath sizes

        Args:
            n_range: Bath sizes, each in [3, 11]
            t_points: Samples on [0, 2pi]
            theta_points: Evenly spaced angles on [0, pi/2] for the theta family
            thetas: Explicit angles, used instead of theta_points when given

        Returns:
            VerificationReport (failures are report content)

        Raises:
            InvalidParameter: For bath sizes outside [3, 11] or empty grids
        """
        n_list = [int(n) for n in n_range]
        for n in n_list:
            if not VERIFY_MIN_BATH <= n <= VERIFY_MAX_BATH:
                raise InvalidParameter(
                    f"Verification bath sizes must lie in [{VERIFY_MIN_BATH}, {VERIFY_MAX_BATH}], got {n}"
                )
        if thetas is not None:
            thetas = [float(theta) for theta in thetas]
            if not thetas:
                raise InvalidParameter("Explicit theta list is empty")
        elif theta_points < 1:
            raise InvalidParameter(f"theta_points must be positive, got {theta_points}")
        else:
            thetas = list(np.linspace(0.0, THETA_MAX, theta_points)) if theta_points > 1 else [0.0]
        t_grid = time_grid(VERIFY_T_MAX, t_points)

        report = VerificationReport(n_range=n_list, tolerances=self.tolerances)
        for n in n_list:
            for family in StateFamily:
                if family is StateFamily.THETA_FAMILY:
                    specs = [InitialStateSpec(family, n, float(theta)) for theta in thetas]
                else:
                    specs = [InitialStateSpec(family, n)]
                for spec in specs:
                    self.verify_spec(report, spec, t_grid)
                logger.info("Verified %s at N=%d", family.value, n)

        summary = report.get_summary()
        logger.info(
            "Verification finished: %d/%d passed", summary['passed'], summary['total']
        )
        return report

    def run_appendix_grid(self) -> VerificationReport:
        """Consistency matrix on N = 4..10, theta in {0, 0.7, pi/3, pi/2} and 25 samples"""
        return self.run_verification(APPENDIX_N_RANGE, APPENDIX_T_POINTS, thetas=APPENDIX_THETAS)
