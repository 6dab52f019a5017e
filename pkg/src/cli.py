"""Command line interface for the elliptic log-connection toolkit."""

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Union

import yaml

from .config import DEFAULT_PRESET, INSTANCE_KEYS, RunConfig, load_config_file, resolve_instance
from .connection import Direction, connection_to_record, eigendirection, elm, fuchs_check, residue_data
from .curve import INSTANCES, CurveInstance
from .errors import DomainError, LogConnError
from .exact import format_projective, format_rational, parse_rational, projectively_equal
from .family import cross_residues, nabla_c, verify_family
from .maps import (
    app,
    app_degenerate_projective,
    app_det,
    app_matrix,
    bun_prime,
    mat3_apply,
    par,
    par_inverse,
)
from .parabolic import desc_from_record, exponents_from_record, flatness_report_data
from .report import Report
from .samples import sample_count
from .selftest import SUITES, run_selftest
from .symplectic import run_symplectic_suite

logger = logging.getLogger(__name__)

# Exit codes
EXIT_SUCCESS = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 3
EXIT_INVALID_INPUT = 2
EXIT_KEYBOARD_INTERRUPT = 130

POINT_NAMES = {"w0": "w0", "w1": "w1", "wlam": "w_lam", "w_lam": "w_lam", "t1": "t1", "t2": "t2"}


def format_error_message(context: str, error: Exception) -> str:
    """Format error messages consistently across the CLI.

    Args:
        context: Description of what was being attempted
        error: The exception that occurred

    Returns:
        Formatted error message
    """
    return f"Failed to {context}: {error}"


def rational_arg(text: str) -> Fraction:
    """argparse type for rational literals such as ``-3`` or ``1/5``."""
    try:
        return parse_rational(text)
    except DomainError as e:
        raise argparse.ArgumentTypeError(str(e))


def coordinate_arg(text: str) -> Optional[Fraction]:
    """A rational coordinate on P^1, with ``inf`` standing for the point at infinity."""
    return None if text.strip().lower() in ("inf", "infinity") else rational_arg(text)


def direction_arg(text: str) -> Union[Direction, Optional[Fraction]]:
    """A direction ``(u:v)``, a slope, or ``inf`` for (0:1)."""
    if text.strip().startswith("("):
        try:
            return Direction.parse(text)
        except DomainError as e:
            raise argparse.ArgumentTypeError(str(e))
    return coordinate_arg(text)


def _add_base_point(parser: argparse.ArgumentParser, coordinate=rational_arg) -> None:
    parser.add_argument("--z1", type=coordinate, required=True, help="First apparent direction z1")
    parser.add_argument("--z2", type=coordinate, required=True, help="Second apparent direction z2")


def _add_higgs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--c1", type=rational_arg, default=Fraction(0), help="Higgs coordinate c1 (default: 0)")
    parser.add_argument("--c2", type=rational_arg, default=Fraction(0), help="Higgs coordinate c2 (default: 0)")


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser for the CLI."""
    parser = argparse.ArgumentParser(
        prog="elliptic-logconn",
        description="Construct and verify logarithmic rank-2 connections on y^2 = x(x-1)(x-lambda) exactly",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Check the family member at z = (1, 2), c = (1, 1) on the default instance
  elliptic-logconn family-verify --z1 1 --z2 2 --c1 1 --c2 1

  # Degeneration of App over the point z = (t, t)
  elliptic-logconn app-analyze --z1 3 --z2 3

  # Flatness of a parabolic bundle described in a YAML file, on instance B
  elliptic-logconn --instance B flat --desc bundle.yaml

  # Full acceptance run with the report saved to a file
  elliptic-logconn --config instance.conf --output report.json selftest
        """,
    )

    parser.add_argument("--config", type=Path, help="Instance file with key=value lines or a YAML mapping")
    parser.add_argument(
        "--instance",
        choices=sorted(INSTANCES),
        default=DEFAULT_PRESET,
        help=f"Preset instance the config file and flags start from (default: {DEFAULT_PRESET})",
    )
    for key in INSTANCE_KEYS:
        parser.add_argument(f"--{key}", dest=f"param_{key}", type=rational_arg, help=f"Override {key}")
    parser.add_argument("--output", type=Path, help="Output file to save the JSON report")
    parser.add_argument("--verbose", action="store_true", help="Log progress to stderr")
    parser.add_argument("--debug", action="store_true", help="Log debug details to stderr")

    commands = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    family = commands.add_parser("family-verify", help="Check the local data of one family member")
    _add_base_point(family)
    _add_higgs(family)

    par_parser = commands.add_parser("par", help="Parabolic directions (p1+, p1-, p2+, p2-) of a family member")
    _add_base_point(par_parser)
    _add_higgs(par_parser)

    par_inv = commands.add_parser("par-inv", help="Higgs coordinates from the minus directions zeta")
    _add_base_point(par_inv)
    par_inv.add_argument("--zeta1", type=direction_arg, required=True, help="Slope, (u:v) or inf")
    par_inv.add_argument("--zeta2", type=direction_arg, required=True, help="Slope, (u:v) or inf")

    app_parser = commands.add_parser("app", help="App image of a family member")
    _add_base_point(app_parser)
    _add_higgs(app_parser)

    analyze = commands.add_parser("app-analyze", help="Rank and degeneration of App over a base point")
    _add_base_point(analyze, coordinate_arg)

    bunprime = commands.add_parser("bunprime", help="The Bun' point of a base point")
    _add_base_point(bunprime)

    symplectic = commands.add_parser("symplectic", help="Pointwise checks of the symplectic identities")
    symplectic.add_argument("--suite", choices=["par", "eta", "torelli"], required=True)
    symplectic.add_argument("--count", type=int, help="Number of samples (default: published count)")

    elm_parser = commands.add_parser("elm", help="Elementary transformation of a family member")
    elm_parser.add_argument("--point", choices=sorted(POINT_NAMES), required=True)
    elm_parser.add_argument("--sign", choices=["+", "-"], required=True)
    elm_parser.add_argument("--direction", type=Direction.parse, help="Direction (u:v) (default: plus eigendirection)")
    _add_base_point(elm_parser)
    _add_higgs(elm_parser)

    flat = commands.add_parser("flat", help="Flatness verdict for a parabolic bundle description")
    flat.add_argument("--desc", type=Path, required=True, help="YAML or JSON bundle description")

    selftest = commands.add_parser("selftest", help="Run the acceptance suites")
    selftest.add_argument("--quick", action="store_true", help="Use the reduced published sample counts")
    selftest.add_argument("--suite", action="append", choices=list(SUITES), help="Run only this suite (repeatable)")

    return parser


def configure_logging(verbose: bool = False, debug: bool = False) -> None:
    level = logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def build_config(args: argparse.Namespace) -> RunConfig:
    """Resolve the instance (preset < config file < flags) and collect the command arguments.

    Raises:
        ValueError: If the config file cannot be read or the instance is invalid
    """
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {key: getattr(args, f"param_{key}") for key in INSTANCE_KEYS}
    instance = resolve_instance(args.instance, file_values, overrides)
    skip = {"config", "instance", "output", "verbose", "debug", "command"}
    arguments = {
        key: value for key, value in vars(args).items() if key not in skip and not key.startswith("param_")
    }
    return RunConfig(instance, args.command, arguments, args.output, args.verbose, args.debug)


def _z(arguments: Dict[str, Any]):
    return (arguments["z1"], arguments["z2"])


def _family_verify(inst: CurveInstance, arguments: Dict[str, Any]) -> Report:
    report = verify_family(inst, _z(arguments), arguments["c1"], arguments["c2"])
    report.data["cross_residues"] = cross_residues(inst, _z(arguments))
    return report


def _par(inst: CurveInstance, arguments: Dict[str, Any]) -> Report:
    report = Report("par")
    report.data.update(par(inst, _z(arguments), arguments["c1"], arguments["c2"]).to_record())
    return report


def _par_inv(inst: CurveInstance, arguments: Dict[str, Any]) -> Report:
    report = Report("par-inv")
    c1, c2 = par_inverse(inst, _z(arguments), (arguments["zeta1"], arguments["zeta2"]))
    report.data["c"] = [format_rational(c1), format_rational(c2)]
    return report


def _app(inst: CurveInstance, arguments: Dict[str, Any]) -> Report:
    report = Report("app")
    z, c1, c2 = _z(arguments), arguments["c1"], arguments["c2"]
    coords = app(inst, nabla_c(inst, z, c1, c2))
    expected = mat3_apply(app_matrix(inst, z), (1, c1, c2))
    report.add("matrix", projectively_equal(coords.as_tuple(), expected), f"matrix gives {format_projective(expected)}")
    report.data["coordinates"] = [format_rational(v) for v in coords.as_tuple()]
    report.data["projective"] = list(coords.normalized())
    return report


def _app_analyze(inst: CurveInstance, arguments: Dict[str, Any]) -> Report:
    report = Report("app-analyze")
    z1, z2 = _z(arguments)
    report.data["verdict"] = app_degenerate_projective(inst, z1, z2).to_record()
    if z1 is not None and z2 is not None:
        report.data["det"] = format_rational(app_det(inst, (z1, z2)))
    return report


def _bunprime(inst: CurveInstance, arguments: Dict[str, Any]) -> Report:
    report = Report("bunprime")
    coords = bun_prime(inst, _z(arguments))
    report.data["coordinates"] = [format_rational(v) for v in coords.as_tuple()]
    report.data["projective"] = list(coords.normalized())
    return report


def _symplectic(inst: CurveInstance, arguments: Dict[str, Any]) -> Report:
    suite = arguments["suite"]
    count = arguments.get("count") or sample_count(suite)
    return run_symplectic_suite(inst, suite, count=count)


def _elm(inst: CurveInstance, arguments: Dict[str, Any]) -> Report:
    report = Report("elm")
    point = inst.named_point(POINT_NAMES[arguments["point"]])
    conn = nabla_c(inst, _z(arguments), arguments["c1"], arguments["c2"])
    plus, _ = conn.ledger.at(point)
    direction = arguments.get("direction") or eigendirection(residue_data(inst, conn, point).residue, plus)
    result = elm(inst, conn, point, direction, arguments["sign"])

    new_plus, new_minus = result.ledger.at(point)
    residue = residue_data(inst, result, point).residue
    report.add("fuchs", fuchs_check(result), "degree plus exponent sum is nonzero")
    report.add(
        "exponents",
        residue.trace() == new_plus + new_minus and residue.det() == new_plus * new_minus,
        f"residue trace {format_rational(residue.trace())}, det {format_rational(residue.det())}",
    )
    report.data["direction"] = str(direction)
    report.data["connection"] = connection_to_record(result)
    return report


def _flat(inst: CurveInstance, arguments: Dict[str, Any]) -> Report:
    path: Path = arguments["desc"]
    try:
        with path.open("r", encoding="utf-8") as f:
            record = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ValueError(f"Parse bundle description {path}: {e}")
    except OSError as e:
        raise ValueError(f"Cannot read bundle description {path}: {e}")
    if not isinstance(record, dict):
        raise ValueError(f"Bundle description {path} must hold a mapping")

    report = Report("flat")
    desc = desc_from_record(inst, record)
    report.data.update(flatness_report_data(inst, desc, exponents_from_record(inst, record.get("nu"))))
    return report


def _selftest(inst: CurveInstance, arguments: Dict[str, Any]) -> Report:
    return run_selftest(inst, arguments.get("quick", False), arguments.get("suite"))


COMMANDS: Dict[str, Callable[[CurveInstance, Dict[str, Any]], Report]] = {
    "family-verify": _family_verify,
    "par": _par,
    "par-inv": _par_inv,
    "app": _app,
    "app-analyze": _app_analyze,
    "bunprime": _bunprime,
    "symplectic": _symplectic,
    "elm": _elm,
    "flat": _flat,
    "selftest": _selftest,
}


def run(config: RunConfig) -> Report:
    """Dispatch one command and return its report."""
    logger.info(f"Running {config.command} on instance {config.instance.to_record()}")
    return COMMANDS[config.command](config.instance, config.arguments)


def main() -> int:
    """Main entry point for the CLI."""
    parser = create_parser()
    args = parser.parse_args()
    configure_logging(args.verbose, args.debug)

    try:
        config = build_config(args)
        report = run(config)
        output = report.to_json(config.instance.to_record())

        # Output the results
        if config.output:
            try:
                config.output.parent.mkdir(parents=True, exist_ok=True)
                config.output.write_text(output + "\n", encoding="utf-8")
                print(f"Report saved to {config.output}", file=sys.stderr)
            except (OSError, PermissionError) as e:
                print(format_error_message(f"write to output file {config.output}", e), file=sys.stderr)
                return EXIT_ERROR
        else:
            print(output)

        if not report.passed:
            print(report.summary(), file=sys.stderr)
            return EXIT_CHECK_FAILED
        return EXIT_SUCCESS

    except KeyboardInterrupt:
        print("\nOperation cancelled by user", file=sys.stderr)
        return EXIT_KEYBOARD_INTERRUPT
    except ValueError as e:
        print(format_error_message(f"run {args.command}", e), file=sys.stderr)
        return EXIT_INVALID_INPUT
    except LogConnError as e:
        print(format_error_message(f"run {args.command}", e), file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.debug("Unexpected failure", exc_info=True)
        print(format_error_message(f"run {args.command}", e), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
