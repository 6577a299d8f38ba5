"""Command-line entry point for sphere-cr.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 numerical failure (non-convergence, singular value, degenerate fit).
"""

import argparse
import math
import sys
from typing import Any, Optional, Sequence

from pydantic import ValidationError

from src.cli.commands import COMMANDS
from src.core.config import get_settings
from src.core.enums import CheckFamily, OutputFormat
from src.core.exceptions import SphereCRError, UsageError
from src.core.logging import configure_logging, get_logger
from src.schemas.cli import CliConfig
from src.schemas.verify import GridSpec

logger = get_logger(__name__)

EXIT_USAGE = 2


def _add_output_flags(parser: argparse.ArgumentParser, default: OutputFormat) -> None:
    parser.add_argument(
        "--format",
        choices=[f.value for f in OutputFormat],
        default=None,
        help=f"Output format (default: {default.value}).",
    )
    parser.add_argument("--output", "-o", default=None, help="Output file (default: stdout).")
    parser.add_argument(
        "--json",
        nargs="?",
        const="-",
        default=None,
        metavar="PATH",
        help="Write JSON to PATH (stdout when PATH is omitted).",
    )


def _add_angle_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--theta", type=float, default=None, help="Azimuth, 0 < theta < 2*pi.")
    parser.add_argument("--phi", type=float, default=None, help="Polar angle, 0 < phi < pi.")
    parser.add_argument("--degrees", action="store_true", help="Read --theta/--phi in degrees.")


def _add_index_flags(parser: argparse.ArgumentParser, many: bool) -> None:
    nargs = "+" if many else None
    parser.add_argument("--k", type=int, nargs=nargs, default=None, help="Family numerator(s) k.")
    parser.add_argument("--m", type=int, nargs=nargs, default=None, help="Family denominator(s) m.")
    parser.add_argument("--n", type=float, nargs=nargs, default=None, help="Radial decay rate(s) n > 0.")


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sphere-cr",
        description="Angular Cauchy-Riemann calculus on the sphere: evaluation and verification.",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR.")
    parser.add_argument("--log-json", action="store_true", help="JSON log lines on stderr.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_eval = sub.add_parser("eval", help="Value and exact partial derivatives at a point.")
    p_eval.add_argument("expression", help='Expression, e.g. "exp(-i*zeta)".')
    _add_angle_flags(p_eval)
    p_eval.add_argument("--show-D", dest="show_d", action="store_true", help="Also print D f and Dbar f.")
    _add_output_flags(p_eval, OutputFormat.TEXT)

    p_verify = sub.add_parser("verify", help="Run the verification suite.")
    p_verify.add_argument("--all", action="store_true", help="Run every check family (default).")
    p_verify.add_argument(
        "--family",
        action="append",
        choices=[f.value for f in CheckFamily],
        default=None,
        help="Run only this family; repeatable.",
    )
    p_verify.add_argument("--seed", type=lambda s: int(s, 0), default=None, help="RNG seed.")
    p_verify.add_argument("--tol", type=float, default=None, help="Replace every tolerance.")
    p_verify.add_argument("--m-max", type=int, default=12, help="Largest m in the phi sweep.")
    p_verify.add_argument("--n-theta", type=int, default=None)
    p_verify.add_argument("--n-phi", type=int, default=None)
    p_verify.add_argument("--margin-theta", type=float, default=None)
    p_verify.add_argument("--margin-phi", type=float, default=None)
    p_verify.add_argument("--radii", type=float, nargs="+", default=None)
    p_verify.add_argument("--fd-order", type=int, choices=[2, 4], default=None)
    p_verify.add_argument(
        "--no-negative-controls", dest="negative_controls", action="store_false"
    )
    _add_index_flags(p_verify, many=True)
    _add_output_flags(p_verify, OutputFormat.TEXT)

    p_norm = sub.add_parser("norm", help="Squared L2 norm of g_{k/m} by quadrature.")
    _add_index_flags(p_norm, many=False)
    p_norm.add_argument("--tol", type=float, default=None, help="Allowed |norm^2 - 1|.")
    _add_output_flags(p_norm, OutputFormat.TEXT)

    p_residual = sub.add_parser("residual", help="Schrodinger residuals over a radial sweep.")
    p_residual.add_argument("expression", nargs="?", default=None, help="Angular factor (default h_{k/m}).")
    _add_index_flags(p_residual, many=False)
    _add_angle_flags(p_residual)
    p_residual.add_argument("--radii", type=float, nargs="+", default=None)
    p_residual.add_argument("--h", type=float, default=None, help="Finite-difference step.")
    p_residual.add_argument("--fd-order", type=int, choices=[2, 4], default=None)
    _add_output_flags(p_residual, OutputFormat.TEXT)

    p_table = sub.add_parser("table", help="Phi-integral closed form against quadrature (CSV).")
    p_table.add_argument("--m-max", type=int, default=12)
    _add_output_flags(p_table, OutputFormat.CSV)

    return parser


def _as_list(value: object) -> list:
    if value is None:
        return []
    if isinstance(value, list):
        return value
    return [value]


def _output(args: argparse.Namespace, default: OutputFormat) -> tuple[OutputFormat, Optional[str]]:
    if args.json is not None:
        return OutputFormat.JSON, args.json
    fmt = OutputFormat(args.format) if args.format else default
    return fmt, args.output


def _flag(args: argparse.Namespace, name: str, default: Any) -> Any:
    """The flag value, or ``default`` only when the flag was not given."""
    value = getattr(args, name, None)
    return default if value is None else value


def build_config(args: argparse.Namespace) -> CliConfig:
    """Turn parsed flags into a validated CliConfig; settings fill the gaps."""
    settings = get_settings()
    default_format = OutputFormat.CSV if args.subcommand == "table" else OutputFormat.TEXT
    fmt, path = _output(args, default_format)

    theta = getattr(args, "theta", None)
    phi = getattr(args, "phi", None)
    if getattr(args, "degrees", False):
        theta = None if theta is None else math.radians(theta)
        phi = None if phi is None else math.radians(phi)

    expression = getattr(args, "expression", None)
    seed = getattr(args, "seed", None)
    families = getattr(args, "family", None)
    try:
        grid = GridSpec(
            n_theta=_flag(args, "n_theta", settings.grid_n_theta),
            n_phi=_flag(args, "n_phi", settings.grid_n_phi),
            margin_theta=_flag(args, "margin_theta", settings.margin_theta),
            margin_phi=_flag(args, "margin_phi", settings.margin_phi),
            seed=settings.seed if seed is None else seed,
        )
    except ValidationError as exc:
        error = exc.errors()[0]
        field = str(error["loc"][0]) if error["loc"] else None
        raise UsageError(f"{field}: {error['msg']}", field=field) from exc

    return CliConfig(
        subcommand=args.subcommand,
        expressions=_as_list(expression),
        theta=theta,
        phi=phi,
        k_values=_as_list(getattr(args, "k", None)),
        m_values=_as_list(getattr(args, "m", None)),
        n_values=_as_list(getattr(args, "n", None)),
        radii=_as_list(getattr(args, "radii", None)),
        m_max=getattr(args, "m_max", 12),
        families=[CheckFamily(f) for f in families] if families else list(CheckFamily),
        grid=grid,
        tolerance=getattr(args, "tol", None),
        negative_controls=getattr(args, "negative_controls", True),
        fd_step=_flag(args, "h", settings.fd_step),
        fd_order=_flag(args, "fd_order", settings.fd_order),
        output_format=fmt,
        output_path=path,
        show_d=getattr(args, "show_d", False),
        seed=settings.seed if seed is None else seed,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0; argparse usage errors exit 2.
        return int(exc.code or 0)

    settings = get_settings()
    configure_logging(
        log_level=args.log_level or settings.log_level,
        json_output=args.log_json or settings.log_json,
    )

    try:
        cfg = build_config(args)
        code = COMMANDS[cfg.subcommand](cfg)
    except SphereCRError as exc:
        logger.debug("command_failed", error_code=exc.error_code, details=exc.details)
        print(f"sphere-cr: error [{exc.error_code}]: {exc.message}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"sphere-cr: error [io_error]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
