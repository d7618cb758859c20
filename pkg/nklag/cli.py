"""Command-line surface: `python -m nklag <command> ...`."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .builder import build
from .config import BuildConfig, SolveConfig, VerifyConfig, resolve_field
from .core.errors import (
    ConfigError,
    DomainError,
    FrameQualityError,
    IntegrationError,
    NoConvergenceError,
    PathDependenceError,
    StructureViolationError,
)
from .core.structure import identity_residuals
from .fixtures import FIXTURES
from .io import read_immersion_csv, write_field, write_immersion_csv, write_obj, write_report
from .pde import EllipticProblem, residual_norm, solve_elliptic
from .verify import certify

logger = logging.getLogger("nklag")

DEFAULT_CONFIG_LOCATION = "config/config.yml"

# Domain and setup problems exit with 2, tolerance failures with 1.
SETUP_ERRORS = (DomainError, ConfigError, NoConvergenceError, IntegrationError, PathDependenceError, OSError)
TOLERANCE_ERRORS = (FrameQualityError, StructureViolationError)


def _console() -> Console:
    return Console(highlight=False)


def _setup_logging(verbose: bool) -> None:
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        logger.addHandler(RichHandler(console=Console(stderr=True), show_path=False))


def check_structure(args: argparse.Namespace) -> int:
    residuals = identity_residuals(args.samples, args.seed)
    table = Table(title=f"structure identities ({args.samples} samples, seed {args.seed})")
    table.add_column("identity")
    table.add_column("sup residual", justify="right")
    table.add_column("ok")
    for name, value in residuals.items():
        table.add_row(name, f"{value:.3e}", "yes" if value < args.tol else "NO")
    _console().print(table)
    failed = [name for name, value in residuals.items() if not value < args.tol]
    if failed:
        logger.error(f"{len(failed)} identities above {args.tol:g}: {', '.join(failed)}")
        return 1
    return 0


def solve_pde(args: argparse.Namespace) -> int:
    config = SolveConfig.load_config(args.config)
    if args.kind is not None:
        config = dataclasses.replace(config, kind=args.kind)
    grid = config.grid
    source = config.source_field()
    prob = EllipticProblem.from_field(
        config.kind, resolve_field(config.boundary, grid), source=source, initial_guess=config.initial_guess
    )
    solution = solve_elliptic(prob, config.tol, config.max_iter)
    write_field(args.out, solution)
    logger.info(f"{config.kind} residual {residual_norm(config.kind, solution, source):.3e}")
    return 0


def build_cmd(args: argparse.Namespace) -> int:
    config = BuildConfig.load_config(args.config)
    if args.case is not None:
        config = dataclasses.replace(config, case=args.case)
    q0 = None if config.q0 is None else np.array(config.q0)
    immersion = build(config.case, config.inputs(), config.grid, q0)
    if immersion.masked_count:
        logger.warning(f"{immersion.masked_count} sites masked and omitted from {args.out}")
    write_immersion_csv(args.out, immersion)
    return 0


def verify_cmd(args: argparse.Namespace) -> int:
    config = VerifyConfig.load_config(args.config) if args.config else VerifyConfig()
    fd_step = config.fd_step if args.fd_step is None else args.fd_step
    margin = config.margin if args.margin is None else args.margin
    target = FIXTURES[args.fixture] if args.fixture else read_immersion_csv(args.input)
    report = certify(target, fd_step, config.thresholds, margin=margin)

    table = Table(title=f"verification over {report.sites} sites")
    table.add_column("check")
    table.add_column("value", justify="right")
    table.add_column("threshold", justify="right")
    for name, value in report.values.items():
        shown = "skipped" if value is None else f"{value:.3e}"
        table.add_row(name, shown, f"{report.thresholds[name]:g}")
    for name, limit in report.gated_extras().items():
        value = report.extras.get(name)
        if value is not None:
            table.add_row(name, f"{value:.3e}", f"{limit:g}")
    _console().print(table)
    if args.report:
        write_report(args.report, report)
    failed = report.failures()
    if failed:
        logger.error(f"checks above threshold: {', '.join(failed)}")
        return 1
    return 0


def export_cmd(args: argparse.Namespace) -> int:
    immersion = read_immersion_csv(args.input)
    match args.format:
        case "csv":
            write_immersion_csv(args.out, immersion)
        case "obj":
            write_obj(args.out, immersion, args.t_index)
    return 0


PARSER = argparse.ArgumentParser(
    prog="python -m nklag",
    description="Lagrangian submanifolds of the nearly Kähler S³×S³ from minimal surfaces.",
    formatter_class=argparse.ArgumentDefaultsHelpFormatter,
)
PARSER.add_argument("--verbose", action="store_true", help="log debug progress")
_COMMANDS = PARSER.add_subparsers(dest="command", required=True, metavar="COMMAND")


def _command(name: str, handler, help: str) -> argparse.ArgumentParser:
    parser = _COMMANDS.add_parser(name, help=help, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.set_defaults(handler=handler)
    return parser


_check = _command("check-structure", check_structure, "check the structure identities on random tangents")
_check.add_argument("--samples", type=int, default=10_000, help="number of random tangent triples")
_check.add_argument("--seed", type=int, default=1, help="random generator seed")
_check.add_argument("--tol", type=float, default=1e-12, help="largest accepted residual")

_solve = _command("solve-pde", solve_pde, "solve a Dirichlet problem and write the field")
_solve.add_argument("--kind", choices=["sinh-gordon", "liouville", "beta-s3"], help="override the configured equation")
_solve.add_argument("--config", default=DEFAULT_CONFIG_LOCATION, help="path to the configuration file")
_solve.add_argument("--out", required=True, help="field file to write")

_build = _command("build", build_cmd, "build a Lagrangian immersion grid")
_build.add_argument("--case", type=int, choices=[1, 2, 3], help="override the configured case")
_build.add_argument("--config", default=DEFAULT_CONFIG_LOCATION, help="path to the configuration file")
_build.add_argument("--out", required=True, help="CSV file to write")

_verify = _command("verify", verify_cmd, "certify an immersion grid or a closed-form fixture")
_target = _verify.add_mutually_exclusive_group(required=True)
_target.add_argument("--in", dest="input", help="immersion CSV to verify")
_target.add_argument("--fixture", choices=sorted(FIXTURES), help="closed-form immersion to verify")
_verify.add_argument("--report", help="report file to write")
_verify.add_argument("--fd-step", type=float, help="finite-difference step for closed-form maps")
_verify.add_argument(
    "--margin",
    type=int,
    help="grid samples left out next to each face; raise it when the field is not smooth up to the corners",
)
_verify.add_argument("--config", help="configuration file with a verify section")

_export = _command("export", export_cmd, "re-export an immersion CSV")
_export.add_argument("--in", dest="input", required=True, help="immersion CSV to read")
_export.add_argument("--format", choices=["csv", "obj"], default="csv", help="output format")
_export.add_argument("--out", required=True, help="file to write")
_export.add_argument("--t-index", type=int, default=0, help="t-slice of the OBJ mesh")


def _fail(error: Exception) -> None:
    message = " ".join(str(error).split())
    print(f"error: {type(error).__name__}: {message}", file=sys.stderr)


def dispatch(argv: list[str] | None = None) -> int:
    """Run one command and return its exit code."""
    args = PARSER.parse_args(argv)
    _setup_logging(args.verbose)
    try:
        return args.handler(args)
    except SETUP_ERRORS as e:
        _fail(e)
        return 2
    except TOLERANCE_ERRORS as e:
        _fail(e)
        return 1
