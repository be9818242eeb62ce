"""
Main module - command-line entry point
Subcommands evolve, scaling, coherence and verify write CSV/JSON artifacts
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from src.core.engines import Engine
from src.core.orchestrator import SimulationOrchestrator
from src.models.state_spec import StateFamily
from src.services.scaling_service import DEFAULT_N_LIST
from src.services.verification_service import (
    APPENDIX_N_RANGE,
    APPENDIX_T_POINTS,
    APPENDIX_THETAS,
    DEFAULT_T_POINTS,
    DEFAULT_THETA_POINTS,
    VERIFY_MIN_BATH,
    Tolerances,
)
from src.utils.helpers import write_json, write_rows_csv, write_series_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_BREACH = 1
EXIT_USAGE = 2
CLOSED_FORM_FAMILIES = ('product', 'ghz', 'w', 'ep')


def _float_list(value: str) -> List[float]:
    try:
        return [float(item) for item in value.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{value}'") from None


def _int_list(value: str) -> List[int]:
    try:
        return [int(item) for item in value.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{value}'") from None


def _str_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(',') if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="central-spin",
        description="Central-spin decoherence simulator"
    )
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Logging level for messages on stderr")
    parser.add_argument("--workers", type=int, default=None,
                        help="Thread pool size for sweeps")
    sub = parser.add_subparsers(dest="command", required=True)

    evolve = sub.add_parser("evolve", help="Time series of one initial state")
    evolve.add_argument("--family", required=True, choices=[f.value for f in StateFamily])
    evolve.add_argument("--n", type=int, required=True, help="Bath size N")
    evolve.add_argument("--theta", type=float, default=None, help="Angle in radians (theta family)")
    evolve.add_argument("--t-max", type=float, required=True)
    evolve.add_argument("--steps", type=int, required=True, help="Samples from 0 to t-max inclusive")
    evolve.add_argument("--engine", default=Engine.COLLECTIVE.value, choices=[e.value for e in Engine])
    evolve.add_argument("--out", required=True, help="CSV path")

    scaling = sub.add_parser("scaling", help="Amplitude scaling fits")
    scaling.add_argument("--families", type=_str_list, default=list(CLOSED_FORM_FAMILIES))
    scaling.add_argument("--n-list", type=_int_list, default=list(DEFAULT_N_LIST))
    scaling.add_argument("--out", required=True, help="CSV path; fits go to the .json sidecar")

    coherence = sub.add_parser("coherence", help="Theta sweep of coherence dynamics")
    coherence.add_argument("--n", type=int, required=True)
    coherence.add_argument("--theta-list", type=_float_list, required=True)
    coherence.add_argument("--t-max", type=float, required=True)
    coherence.add_argument("--steps", type=int, required=True)
    coherence.add_argument("--out", required=True, help="Output directory")

    verify = sub.add_parser("verify", help="Cross-check engines and closed forms")
    verify.add_argument("--n-max", type=int, default=10)
    verify.add_argument("--t-points", type=int, default=DEFAULT_T_POINTS)
    verify.add_argument("--theta-points", type=int, default=DEFAULT_THETA_POINTS)
    defaults = Tolerances()
    verify.add_argument("--tol-ed-collective", type=float, default=defaults.ed_collective)
    verify.add_argument("--tol-ed-analytic", type=float, default=defaults.ed_analytic)
    verify.add_argument("--tol-collective-analytic", type=float, default=defaults.collective_analytic)
    verify.add_argument("--tol-appendix", type=float, default=defaults.appendix)
    verify.add_argument("--json", action="store_true", help="Print the machine-readable report")
    verify.add_argument(
        "--appendix-grid", action="store_true",
        help="Use N = 4..10, theta in {0, 0.7, pi/3, pi/2} and 25 samples instead of the grid options"
    )
    return parser


def run_evolve(args: argparse.Namespace, orchestrator: SimulationOrchestrator) -> int:
    series = orchestrator.evolve(
        family=args.family,
        n_bath=args.n,
        t_max=args.t_max,
        steps=args.steps,
        theta=args.theta,
        engine=args.engine
    )
    path = write_series_csv(args.out, series)
    logger.info("Wrote %d rows to %s", len(series), path)
    return EXIT_OK


def run_scaling(args: argparse.Namespace, orchestrator: SimulationOrchestrator) -> int:
    result = orchestrator.run_scaling(args.families, args.n_list)
    rows = [(s['family'], s['N'], float(s['amplitude'])) for s in result['samples']]
    path = write_rows_csv(args.out, ("family", "N", "amplitude"), rows)
    write_json(Path(path).with_suffix(".json"), result['fits'])
    return EXIT_OK


def run_coherence(args: argparse.Namespace, orchestrator: SimulationOrchestrator) -> int:
    sweep = orchestrator.run_coherence_sweep(args.n, args.theta_list, args.t_max, args.steps)
    out_dir = Path(args.out)
    for series in sweep:
        theta = series.metadata['state']['theta']
        write_series_csv(out_dir / f"theta_{theta:.6f}.csv", series)
    write_json(out_dir / "summary.json", {
        'N': args.n,
        'runs': orchestrator.coherence_service.summarize_sweep(sweep),
        'window_flags': [series.window_flags for series in sweep]
    })
    return EXIT_OK


def run_verify(args: argparse.Namespace, orchestrator: SimulationOrchestrator) -> int:
    orchestrator.verification_service.tolerances = Tolerances(
        ed_collective=args.tol_ed_collective,
        ed_analytic=args.tol_ed_analytic,
        collective_analytic=args.tol_collective_analytic,
        appendix=args.tol_appendix
    )
    if args.appendix_grid:
        report = orchestrator.run_verification(APPENDIX_N_RANGE, APPENDIX_T_POINTS, thetas=APPENDIX_THETAS)
    else:
        report = orchestrator.run_verification(
            range(VERIFY_MIN_BATH, args.n_max + 1), args.t_points, args.theta_points
        )
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.format_text())
    return report.exit_code


COMMANDS = {
    'evolve': run_evolve,
    'scaling': run_scaling,
    'coherence': run_coherence,
    'verify': run_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line

    Returns:
        0 on success, 1 on a verification breach, 2 on usage errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr
    )
    orchestrator = SimulationOrchestrator(workers=args.workers)
    try:
        return COMMANDS[args.command](args, orchestrator)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
