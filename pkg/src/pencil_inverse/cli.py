"""Command-line entry point: forward, inverse, validate and commute.

Exit codes: 0 success, 2 rejected input (validation, positivity, malformed
files), 3 solver or reconstruction failure, 4 quantization violation,
5 alpha0-independence violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .commutation import verify_alpha0_independence
from .errors import (
    DomainError,
    GridMismatchError,
    IntegrationError,
    NotAnEigenvalueError,
    NotPositiveError,
    PencilError,
    QuantizationError,
    ReconstructionError,
    SearchError,
    ValidationError,
)
from .gauge import QUANT_TOL
from .gelfand_levitan import EPS_ALPHA, EPS_LAMBDA
from .grid import DEFAULT_INTERVALS, Grid, resample
from .pencil import PencilPotentials
from .pipeline import PipelineConfig, forward, inverse, synthetic_potentials
from .spectral import SpectralData, report_json, validate

EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_QUANT = 4
EXIT_INDEPENDENCE = 5

log = logging.getLogger("pencil_inverse")


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text + "\n")
    else:
        Path(out).write_text(text + "\n")


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read {path}: {exc}") from exc


def _load_spectral(path) -> SpectralData:
    try:
        return SpectralData.from_dict(_load_json(path))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"{path} is not a spectral data file: {exc}") from exc


def _config(args, **overrides) -> PipelineConfig:
    return PipelineConfig(
        m=args.grid or DEFAULT_INTERVALS,
        N=args.pairs,
        alpha0=overrides.get("alpha0", getattr(args, "alpha0", 1.0)),
        tol_lambda=args.tol_lambda,
        tol_alpha=args.tol_alpha,
        tol_quant=args.tol_quant,
        refine=args.refine,
        seed=args.seed,
    )


def cmd_forward(args) -> int:
    if args.potentials is None:
        pot = synthetic_potentials(args.seed, Grid(args.grid or DEFAULT_INTERVALS))
    else:
        try:
            pot = PencilPotentials.from_dict(_load_json(args.potentials))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"{args.potentials} is not a potentials file: {exc}") from exc
        if args.grid is not None and args.grid != pot.grid.m:
            grid = Grid(args.grid)
            pot = PencilPotentials(resample(pot.p, grid), resample(pot.r, grid))
    sd, _ = forward(pot, args.pairs)
    _emit(json.dumps(sd.to_dict(), indent=1), args.out)
    return 0


def cmd_inverse(args) -> int:
    sd = _load_spectral(args.data)
    result = inverse(sd, _config(args))
    _emit(json.dumps(result.potentials.to_dict()), args.out)
    report = json.dumps(result.report, indent=1)
    if args.report is None:
        sys.stderr.write(report + "\n")
    else:
        Path(args.report).write_text(report + "\n")
    if not result.report["roundtrip_ok"]:
        log.error("round-trip mismatch above tolerance: %s", result.report["roundtrip"])
        return EXIT_SOLVER
    return 0


def cmd_validate(args) -> int:
    report = validate(_load_spectral(args.data))
    _emit(report_json(report), args.out)
    return 0 if report.ok else EXIT_INPUT


def cmd_commute(args) -> int:
    sd = _load_spectral(args.data)
    a, b = args.alpha0
    report = verify_alpha0_independence(sd, a, b, _config(args, alpha0=a))
    _emit(report.to_json(), args.out)
    failed = [k for k, v in report.checks.items() if not v]
    if not report.norms_ok:
        log.error("alpha0 independence violated: failed %s", failed)
        return EXIT_INDEPENDENCE
    if failed:
        log.warning("norms agree but identity checks failed: %s", failed)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-m", "--grid", type=int, default=None,
                        help=f"grid intervals (default: input grid, else {DEFAULT_INTERVALS})")
    common.add_argument("-N", "--pairs", type=int, default=32, help="index range n = +-1..+-N")
    common.add_argument("--seed", type=int, default=0, help="seed of the synthetic potential generator")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--tol-lambda", type=float, default=EPS_LAMBDA)
    solver.add_argument("--tol-alpha", type=float, default=EPS_ALPHA)
    solver.add_argument("--tol-quant", type=float, default=QUANT_TOL)
    solver.add_argument("--refine", action=argparse.BooleanOptionalAction, default=True,
                        help="smooth Gauss-Newton polish after Gelfand-Levitan")

    parser = argparse.ArgumentParser(prog="pencil-inverse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forward", parents=[common], help="spectral data of a pencil")
    p.add_argument("potentials", nargs="?", help="potentials JSON; omitted: synthetic draw from --seed")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("inverse", parents=[common, solver], help="reconstruct (p, r) from spectral data")
    p.add_argument("data")
    p.add_argument("--alpha0", type=float, default=1.0)
    p.add_argument("--report", default=None, help="report file (default: stderr)")
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("validate", parents=[common], help="screen spectral data")
    p.add_argument("data")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("commute", parents=[common, solver], help="alpha0-independence check")
    p.add_argument("data")
    p.add_argument("--alpha0", type=float, nargs=2, default=[1.0, 0.5], metavar=("A", "B"))
    p.set_defaults(func=cmd_commute)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        log.error("%s", exc)
        if exc.report is not None:
            sys.stderr.write(report_json(exc.report) + "\n")
        return EXIT_INPUT
    except (NotPositiveError, DomainError, GridMismatchError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except QuantizationError as exc:
        log.error("%s", exc)
        return EXIT_QUANT
    except (ReconstructionError, IntegrationError, SearchError, NotAnEigenvalueError, PencilError) as exc:
        log.error("%s", exc)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
