"""
Scaling Service - large-N amplitude scaling of the closed-form fidelities
Samples peak-to-trough oscillation amplitudes and fits log-log power laws
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
from scipy import stats

from src.core.analytic import FIDELITY_FORMS, eval_fidelity_closed
from src.core.errors import ConsistencyError, InsufficientSamples, InvalidParameter, UnsupportedFamily
from src.models.scaling import AmplitudeSample, ScalingFit
from src.models.state_spec import StateFamily

logger = logging.getLogger(__name__)

GRID_POINTS = 4096
PRODUCT_SELF_CHECK_TOLERANCE = 1e-6
MIN_FIT_POINTS = 4
DEFAULT_N_LIST = (64, 128, 256, 512, 1024)


def _refined_extremum(values: np.ndarray, index: int) -> float:
    """Vertex of the parabola through a grid extremum and its periodic neighbours"""
    left = values[index - 1]
    centre = values[index]
    right = values[(index + 1) % len(values)]
    curvature = right - 2.0 * centre + left
    if curvature == 0.0:
        return float(centre)
    return float(centre - (right - left) ** 2 / (8.0 * curvature))


def grid_amplitude(family: StateFamily, n_bath: int, grid_points: int = GRID_POINTS) -> float:
    """
    Peak-to-trough of the closed-form fidelity sampled over one period

    Every closed form depends on t only through cos((N+1)t), so one period
    2pi/(N+1) covers the same values as [0, 2pi].
    """
    if grid_points < 3:
        raise InvalidParameter(f"Amplitude grid needs at least 3 points, got {grid_points}")
    t = np.linspace(0.0, 2.0 * math.pi / (n_bath + 1), grid_points, endpoint=False)
    values = np.asarray(eval_fidelity_closed(family, n_bath, t), dtype=float)
    peak = min(_refined_extremum(values, int(np.argmax(values))), 1.0)
    trough = max(_refined_extremum(values, int(np.argmin(values))), 0.0)
    return float(np.clip(peak - trough, 0.0, 1.0))


def amplitude(family: Union[str, StateFamily], n_bath: int, grid_points: int = GRID_POINTS) -> AmplitudeSample:
    """
    Leading oscillation amplitude of the central-spin fidelity

    Args:
        family: One of the four closed-form families
        n_bath: Bath size N
        grid_points: Samples per period for the grid search

    Returns:
        AmplitudeSample for (family, N)

    Raises:
        UnsupportedFamily: For the theta family
        ConsistencyError: If the product-state grid disagrees with 4N/(N+1)^2
    """
    family = StateFamily.parse(family)
    if family not in FIDELITY_FORMS:
        raise UnsupportedFamily(f"No fidelity curve to scale for the {family.value} family")

    value = grid_amplitude(family, n_bath, grid_points)
    if family is StateFamily.PRODUCT_BATH:
        exact = 4.0 * n_bath / (n_bath + 1) ** 2
        if abs(value - exact) > PRODUCT_SELF_CHECK_TOLERANCE:
            raise ConsistencyError(
                f"Grid amplitude {value} differs from exact {exact} for N={n_bath}"
            )
        value = exact
    return AmplitudeSample(family=family, n_bath=int(n_bath), amplitude=value)


def fit_scaling(samples: Sequence[AmplitudeSample]) -> ScalingFit:
    """
    Least-squares fit of log2(amplitude) against log2(N)

    Raises:
        InsufficientSamples: With fewer than four distinct bath sizes
        InvalidParameter: For mixed families or zero amplitudes
    """
    samples = list(samples)
    n_list = sorted({s.n_bath for s in samples})
    if len(n_list) < MIN_FIT_POINTS:
        raise InsufficientSamples(
            f"Scaling fit needs {MIN_FIT_POINTS} distinct N, got {len(n_list)}"
        )
    if len({s.family for s in samples}) > 1:
        raise InvalidParameter("Scaling fit samples must share one family")
    if any(s.amplitude <= 0.0 for s in samples):
        raise InvalidParameter("Zero amplitude has no logarithm")

    x = np.log2([s.n_bath for s in samples])
    y = np.log2([s.amplitude for s in samples])
    result = stats.linregress(x, y)
    r_squared = min(max(float(result.rvalue) ** 2, 0.0), 1.0)
    return ScalingFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        r_squared=r_squared,
        n_list=n_list
    )


class ScalingService:
    """
    Amplitude sampling and power-law fits over families and bath sizes

    Output order follows the order of the requested families and N list
    regardless of the number of workers.
    """

    def __init__(self, grid_points: int = GRID_POINTS, workers: Optional[int] = None):
        """
        Initialize the scaling service

        Args:
            grid_points: Samples per period for the amplitude search
            workers: Thread pool size (None or 1 runs serially)
        """
        self.grid_points = grid_points
        self.workers = workers

    def sample(
        self,
        families: Iterable[Union[str, StateFamily]],
        n_list: Iterable[int] = DEFAULT_N_LIST
    ) -> List[AmplitudeSample]:
        """Amplitudes for every (family, N) pair, family-major"""
        jobs = [(StateFamily.parse(f), int(n)) for f in families for n in n_list]
        logger.info("Sampling %d amplitudes", len(jobs))

        def run(job):
            family, n = job
            return amplitude(family, n, self.grid_points)

        if self.workers and self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                return list(pool.map(run, jobs))
        return [run(job) for job in jobs]

    def fit_all(self, samples: Sequence[AmplitudeSample]) -> Dict[str, ScalingFit]:
        """One fit per family present in the samples"""
        grouped: Dict[StateFamily, List[AmplitudeSample]] = {}
        for s in samples:
            grouped.setdefault(s.family, []).append(s)
        return {family.value: fit_scaling(group) for family, group in grouped.items()}

    def run(
        self,
        families: Iterable[Union[str, StateFamily]],
        n_list: Iterable[int] = DEFAULT_N_LIST
    ) -> Dict[str, Any]:
        """
        Sample and fit in one call

        Returns:
            Dictionary with 'samples' (rows) and 'fits' (per family)
        """
        samples = self.sample(families, n_list)
        fits = self.fit_all(samples)
        for name, fit in fits.items():
            logger.info("Family %s: slope %.4f (r^2 %.6f)", name, fit.slope, fit.r_squared)
        return {
            'samples': [s.to_dict() for s in samples],
            'fits': {name: fit.to_dict() for name, fit in fits.items()}
        }
