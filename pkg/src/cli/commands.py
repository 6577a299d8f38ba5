"""
Subcommand handlers.

Each handler takes a validated ``CliConfig``, writes its output and returns
the process exit code. Library errors propagate to ``main``, which maps
them to exit codes through ``SphereCRError.exit_code``.
"""

import math
from typing import Sequence, TypeVar

from src.cli.grammar import parse_expr
from src.cli.output import (
    RESIDUAL_COLUMNS,
    TABLE_COLUMNS,
    complex_pair,
    format_complex,
    render_suite,
    rows_to_csv,
    to_json,
    write_output,
)
from src.core.enums import CheckStatus, OutputFormat
from src.core.exceptions import UsageError
from src.expr.evaluate import evaluate_jet, symbolic_d, symbolic_dbar
from src.expr.nodes import Expr
from src.expr.printer import to_source
from src.schemas.cli import CliConfig
from src.schemas.family import FamilyIndex, RadialParams
from src.schemas.geometry import AngularPoint, Point3D
from src.schemas.operators import StencilSpec
from src.schemas.quadrature import PhiSingularity
from src.schemas.verify import DEFAULT_NORM_TOLERANCE, SuiteConfig
from src.services.family import (
    associated_solution,
    g_km,
    normalization_constant,
    phi_integral_closed_form,
)
from src.services.operators import RadialProfile, schrodinger_residual
from src.services.quadrature import integrate_phi_singular, r3_norm_sq
from src.services.verify.suite import run_suite

EXIT_OK = 0
EXIT_FAILED = 1

T = TypeVar("T")


def _single(values: Sequence[T], default: T, flag: str) -> T:
    if not values:
        return default
    if len(values) > 1:
        raise UsageError(f"{flag} takes a single value for this subcommand", field=flag)
    return values[0]


def _index(cfg: CliConfig) -> FamilyIndex:
    return FamilyIndex.parse(_single(cfg.k_values, 1, "--k"), _single(cfg.m_values, 2, "--m"))


def _radial(cfg: CliConfig) -> RadialParams:
    return RadialParams(n=_single(cfg.n_values, 1.0, "--n"))


# =============================================================================
# eval
# =============================================================================


def cmd_eval(cfg: CliConfig) -> int:
    """Value and exact partials of one expression at one point."""
    expr = parse_expr(cfg.expressions[0])
    assert cfg.theta is not None and cfg.phi is not None
    p = AngularPoint(theta=cfg.theta, phi=cfg.phi)
    jet = evaluate_jet(expr, p)

    fields = {
        "value": jet.value,
        "d_theta": jet.d_theta,
        "d_phi": jet.d_phi,
        "d_theta_theta": jet.d_theta_theta,
        "d_theta_phi": jet.d_theta_phi,
        "d_phi_phi": jet.d_phi_phi,
    }
    if cfg.show_d:
        fields["D"] = symbolic_d(expr, p)
        fields["Dbar"] = symbolic_dbar(expr, p)

    if cfg.output_format == OutputFormat.JSON:
        payload = {
            "expression": to_source(expr),
            "holomorphic": expr.holomorphic,
            "theta": p.theta,
            "phi": p.phi,
            **{key: complex_pair(z) for key, z in fields.items()},
        }
        write_output(to_json(payload), cfg.output_path)
    elif cfg.output_format == OutputFormat.CSV:
        write_output(
            rows_to_csv(("quantity", "re", "im"), ((k, z.real, z.imag) for k, z in fields.items())),
            cfg.output_path,
        )
    else:
        lines = [f"expression = {to_source(expr)}"]
        lines.extend(f"{key} = {format_complex(z)}" for key, z in fields.items())
        write_output("\n".join(lines), cfg.output_path)
    return EXIT_OK


# =============================================================================
# verify
# =============================================================================


def suite_config(cfg: CliConfig) -> SuiteConfig:
    config = SuiteConfig(
        families=cfg.families,
        grid=cfg.grid,
        seed=cfg.seed,
        m_max=cfg.m_max,
        negative_controls=cfg.negative_controls,
        fd_order=cfg.fd_order,
    )
    if cfg.n_values:
        config = config.model_copy(update={"n_values": cfg.n_values})
    if cfg.radii:
        config = config.model_copy(update={"radii": cfg.radii})
    if cfg.k_values or cfg.m_values:
        if len(cfg.k_values) != len(cfg.m_values):
            raise UsageError("--k and --m must have the same length", field="k_values")
        indices = [(k, m) for k, m in zip(cfg.k_values, cfg.m_values)]
        for k, m in indices:
            FamilyIndex(k=k, m=m)
        config = config.model_copy(update={"indices": indices})
    if cfg.tolerance is not None:
        config = config.with_tolerance(cfg.tolerance)
    return config


def cmd_verify(cfg: CliConfig) -> int:
    """Run the suite; exit 1 if any check does not pass."""
    report = run_suite(suite_config(cfg))
    write_output(render_suite(report, cfg.output_format), cfg.output_path)
    return EXIT_OK if report.status == CheckStatus.PASS else EXIT_FAILED


# =============================================================================
# norm
# =============================================================================


def cmd_norm(cfg: CliConfig) -> int:
    """Squared L2 norm of g_{k/m} by quadrature next to its closed-form constant."""
    rp = _radial(cfg)
    idx = _index(cfg)
    solution = g_km(rp, idx)
    result = r3_norm_sq(solution, solution.singularity, solution.decay_rate)
    tolerance = DEFAULT_NORM_TOLERANCE if cfg.tolerance is None else cfg.tolerance
    deviation = abs(result.value - 1.0)

    payload = {
        "n": rp.n,
        "k": idx.k,
        "m": idx.m,
        "normalization_constant": normalization_constant(rp, idx),
        "norm_sq": result.value,
        "abs_error_estimate": result.abs_error_estimate,
        "evaluations": result.evaluations,
        "deviation": deviation,
        "tolerance": tolerance,
    }
    if cfg.output_format == OutputFormat.JSON:
        write_output(to_json(payload), cfg.output_path)
    elif cfg.output_format == OutputFormat.CSV:
        write_output(rows_to_csv(tuple(payload), [tuple(payload.values())]), cfg.output_path)
    else:
        write_output(
            "\n".join(f"{key} = {value}" for key, value in payload.items()),
            cfg.output_path,
        )
    return EXIT_OK if deviation <= tolerance else EXIT_FAILED


# =============================================================================
# residual
# =============================================================================


def relative_residual(residual: float, field: float) -> float:
    """residual / field; 0 when both vanish, inf when only the field does."""
    if field == 0.0:
        return 0.0 if residual == 0.0 else math.inf
    return residual / field


def _finite_or_none(value: float) -> float | None:
    return value if math.isfinite(value) else None


def cmd_residual(cfg: CliConfig) -> int:
    """(-Laplacian + nu) residuals over a radial sweep at one angular point.

    With an expression argument the angular factor is that expression
    (unnormalized); otherwise it is the normalized g_{k/m}.
    """
    rp = _radial(cfg)
    if cfg.expressions:
        h: Expr = parse_expr(cfg.expressions[0])
        solution = associated_solution(rp, h)
    else:
        solution = g_km(rp, _index(cfg))
    theta = math.pi if cfg.theta is None else cfg.theta
    phi = 0.5 * math.pi if cfg.phi is None else cfg.phi
    angular = AngularPoint(theta=theta, phi=phi)
    radii = cfg.radii or [0.5, 1.0, 2.0]
    stencil = StencilSpec.uniform(cfg.fd_step, order=cfg.fd_order)
    profile = RadialProfile(value=solution.radial.value)

    rows = []
    for r in radii:
        q = Point3D(r=r, angular=angular)
        residual = solution.constant * schrodinger_residual(
            profile, solution.angular, solution.potential, q, stencil
        )
        field = abs(solution.composed(q))
        rows.append((r, theta, phi, abs(residual), field, relative_residual(abs(residual), field)))

    if cfg.output_format == OutputFormat.JSON:
        write_output(
            to_json([dict(zip(RESIDUAL_COLUMNS, map(_finite_or_none, row))) for row in rows]),
            cfg.output_path,
        )
    elif cfg.output_format == OutputFormat.CSV:
        write_output(rows_to_csv(RESIDUAL_COLUMNS, rows), cfg.output_path)
    else:
        lines = [" ".join(f"{c:>12}" for c in RESIDUAL_COLUMNS)]
        lines.extend(" ".join(f"{v:>12.5g}" for v in row) for row in rows)
        write_output("\n".join(lines), cfg.output_path)
    return EXIT_OK


# =============================================================================
# table
# =============================================================================


def phi_table(m_max: int) -> list[tuple[int, int, float, float, float]]:
    """(k, m, closed form, quadrature, |diff|) for 1 <= k <= m - 1, m <= m_max."""
    rows = []
    for m in range(2, m_max + 1):
        for k in range(1, m):
            idx = FamilyIndex(k=k, m=m)
            a = idx.alpha
            closed = phi_integral_closed_form(idx)
            quad = integrate_phi_singular(
                lambda phi, a=a: math.tan(0.5 * phi) ** (2.0 * a) * math.sin(phi),
                PhiSingularity.power(a),
            ).value
            rows.append((k, m, closed, quad, abs(quad - closed)))
    return rows


def cmd_table(cfg: CliConfig) -> int:
    """The phi-integral sweep; CSV unless another format is requested."""
    rows = phi_table(cfg.m_max)
    if cfg.output_format == OutputFormat.JSON:
        write_output(to_json([dict(zip(TABLE_COLUMNS, row)) for row in rows]), cfg.output_path)
    else:
        formatted = [(k, m, f"{c:.8f}", f"{q:.8f}", f"{d:.3e}") for k, m, c, q, d in rows]
        write_output(rows_to_csv(TABLE_COLUMNS, formatted), cfg.output_path)
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "verify": cmd_verify,
    "norm": cmd_norm,
    "residual": cmd_residual,
    "table": cmd_table,
}
