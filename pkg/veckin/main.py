"""
Command-line entry point.

    python -m veckin run --case advection --scheme ec --nx 256 --cfl 0.1
    python -m veckin eoc --case sw-periodic --grids 32,64,128,256
    python -m veckin audit --case burgers

Exit codes: 0 success, 1 runtime failure or failed check, 2 usage error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

# Load environment variables from .env file
load_dotenv()

from .cli import audit, eoc, run
from .errors import VeckinError
from .models import LambdaPolicy, NormWeight, ReferenceKind, RunManifest, SchemeKind
from .services.cases import build_case, case_names
from .settings import get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

COMMANDS = {
    "run": run.execute,
    "eoc": eoc.execute,
    "audit": audit.execute,
}


def _grid_list(text: str) -> List[int]:
    try:
        grids = [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")
    if not grids:
        raise argparse.ArgumentTypeError("empty grid list")
    return grids


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="veckin",
        description="Entropy-conserving and entropy-stable vector-kinetic finite-volume solver",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--case", required=True, choices=case_names(), help="Benchmark problem")
    common.add_argument("--scheme", choices=[s.value for s in SchemeKind], help="Interface flux (default: case)")
    common.add_argument("--cfl", type=float, help="CFL number C (default: case)")
    common.add_argument("--tend", type=float, help="End time T (default: case)")
    common.add_argument("--lambda-policy", choices=[p.value for p in LambdaPolicy], default=LambdaPolicy.PER_STEP.value)
    common.add_argument("--lambda-safety", type=float, default=1.1, help="Factor above the wave-speed bound")
    common.add_argument("--out", help="Output directory (default: VECKIN_OUTPUT_DIR)")

    run_parser = commands.add_parser("run", parents=[common], help="Integrate one case")
    run_parser.add_argument("--nx", type=int, help="Cells in direction 1")
    run_parser.add_argument("--ny", type=int, help="Cells in direction 2")
    run_parser.add_argument("--report-every", type=int, default=1, help="Keep every k-th entropy sample")
    run_parser.add_argument("--no-audits", action="store_true", help="Skip the end-of-run checks")

    eoc_parser = commands.add_parser("eoc", parents=[common], help="Convergence study")
    eoc_parser.add_argument("--grids", type=_grid_list, help="Comma-separated cells per direction")
    eoc_parser.add_argument(
        "--norm",
        choices=[w.value for w in NormWeight],
        default=NormWeight.COUNT.value,
        help="L2 weight: sqrt(sum e^2)/N (count) or sqrt(sum e^2 dV) (volume)",
    )

    commands.add_parser("audit", parents=[common], help="Entropy and moment identity sweeps")
    return parser


def parse_args(argv: Optional[List[str]] = None) -> RunManifest:
    """Parse and validate command-line flags; usage errors exit with code 2"""
    parser = build_parser()
    args = parser.parse_args(argv)
    case = build_case(args.case)

    if getattr(args, "ny", None) is not None and case.dim == 1:
        parser.error(f"--ny is not available for the one-dimensional case {case.name}")
    if args.command == "eoc":
        if case.reference == ReferenceKind.NONE:
            parser.error(f"case {case.name} has no reference solution for a convergence study")
        if args.grids is None and not case.eoc_grids:
            parser.error(f"case {case.name} needs --grids")

    try:
        return RunManifest(
            command=args.command,
            case=args.case,
            scheme=args.scheme,
            nx=getattr(args, "nx", None),
            ny=getattr(args, "ny", None),
            cfl=args.cfl,
            t_end=args.tend,
            lambda_policy=args.lambda_policy,
            lambda_safety=args.lambda_safety,
            grids=getattr(args, "grids", None),
            norm=getattr(args, "norm", NormWeight.COUNT.value),
            out_dir=args.out or get_settings().output_dir,
            report_every=getattr(args, "report_every", 1),
            audits=not getattr(args, "no_audits", False),
        )
    except ValidationError as exc:
        parser.error(str(exc))


def main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    logging.basicConfig(
        level=settings.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        manifest = parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    try:
        passed = COMMANDS[manifest.command](manifest, settings)
    except (VeckinError, OSError) as e:
        logger.error(f"{manifest.command} {manifest.case} failed: {e}")
        return EXIT_FAILURE

    if not passed:
        logger.warning(f"{manifest.command} {manifest.case}: checks failed")
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
