"""
Named, tolerance-parameterized checks.

Exact-jet checks (cr, closures, composition, harmonicity, gradient
orthogonality) report the raw maximum residual over the grid and compare it
against tol * (1 + max |f|); the per-point relative maximum goes to
``details``. Random holomorphy reports the relative maximum itself,
max |D f| / (1 + |f|), against the bare tolerance.

Finite-difference checks (factorization, schrodinger, associated solution)
cannot reach zero: they fit error ~ C h^slope over a halving step sequence
and report how far the slope falls short of the stencil order. Sequences
sitting entirely on the roundoff floor report 0.
"""

import dataclasses
import math
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from src.core.config import get_settings
from src.core.enums import Composition
from src.core.exceptions import NotApplicableError, SingularValueError
from src.expr.evaluate import evaluate, evaluate_jet, log_branch_hits
from src.expr.jet import Jet2
from src.expr.nodes import W_MAP, Conj, Exp, Expr, IntPow, Inv, Log, Mul, imag_part, real_part
from src.schemas.family import FamilyIndex, RadialParams
from src.schemas.geometry import AngularPoint, Point3D
from src.schemas.operators import StencilSpec
from src.schemas.quadrature import PhiSingularity
from src.schemas.verify import CheckReport, GridSpec
from src.services.family import (
    SeparableSolution,
    associated_solution,
    g_km,
    phi_integral_closed_form,
)
from src.services.operators import (
    Angular,
    RadialProfile,
    as_function,
    angular_laplacian,
    exact_angular_laplacian,
    exact_gradient_dot,
    factorized_laplacian,
    fit_error_model,
    schrodinger_residual,
)
from src.services.quadrature import integrate_phi_singular, r3_norm_sq
from src.services.verify.grid import (
    grid_points,
    random_holomorphic_expr,
    random_points,
    require_stencil_room,
    shrinking_margins,
)

DEFAULT_STEPS = (1e-2, 5e-3, 2.5e-3)
DEFAULT_RADII = (0.5, 1.0, 2.0)
INVERSE_SKIP_BELOW = 1e-8

# Finite-difference roundoff: FLOOR_FACTOR * eps * scale / h^2.
FLOOR_FACTOR = 1e3
_EPS = float(np.finfo(float).eps)

# Random-expression points are kept when (|f_theta| + sin|f_phi|) / (1 + |f|)
# stays below this and |f| below MAX_MAGNITUDE.
MAX_CONDITION = 50.0
MAX_MAGNITUDE = 1e6


def _exact_tolerance(tol: Optional[float]) -> float:
    return get_settings().exact_tolerance if tol is None else tol


def _slack(slack: Optional[float]) -> float:
    return get_settings().order_slack if slack is None else slack


def _order(order: Optional[int]) -> int:
    return get_settings().fd_order if order is None else order


def _stencil(h: float, order: int) -> StencilSpec:
    return StencilSpec.uniform(h, order=4 if order == 4 else 2)


def _d_residuals(jet: Jet2, sin_phi: float) -> tuple[float, float]:
    """|d_theta u - sin d_phi v| and |d_theta v + sin d_phi u|, i.e. |Re D f|, |Im D f|."""
    d = jet.d_theta + 1j * sin_phi * jet.d_phi
    return abs(d.real), abs(d.imag)


@dataclasses.dataclass
class _Sweep:
    """Running maxima of one pass over the grid.

    ``raw`` is the reported metric; ``magnitude`` is the largest |f| seen and
    scales the tolerance; ``relative`` is max raw / (1 + |f|) per point.
    """

    raw: float = 0.0
    magnitude: float = 0.0
    relative: float = 0.0
    tested: int = 0
    skipped: int = 0
    branch_points: int = 0

    def record(self, raw: float, magnitude: float) -> None:
        self.tested += 1
        self.include(raw, magnitude)

    def include(self, raw: float, magnitude: float) -> None:
        """Fold a residual into the maxima without counting a new point."""
        self.raw = max(self.raw, raw)
        self.magnitude = max(self.magnitude, magnitude)
        self.relative = max(self.relative, raw / (1.0 + magnitude))

    @property
    def final_metric(self) -> float:
        return self.raw if self.tested else math.inf

    def tolerance(self, tol: float) -> float:
        return tol * (1.0 + self.magnitude)


def _cr_sweep(f: Expr, points: Iterable[AngularPoint]) -> _Sweep:
    sweep = _Sweep()
    for p in points:
        try:
            jet = evaluate_jet(f, p)
        except SingularValueError:
            sweep.skipped += 1
            continue
        r1, r2 = _d_residuals(jet, math.sin(p.phi))
        sweep.record(max(r1, r2), abs(jet.value))
        sweep.branch_points += log_branch_hits(f, p)
    return sweep


def _sweep_details(sweep: _Sweep, **extra: object) -> dict[str, object]:
    details: dict[str, object] = {
        "max_residual": sweep.raw,
        "relative_residual": sweep.relative,
        "tolerance_scale": 1.0 + sweep.magnitude,
        "skipped": sweep.skipped,
        "log_branch_points": sweep.branch_points,
    }
    details.update(extra)
    return details


# =============================================================================
# Holomorphy and closure
# =============================================================================


def require_holomorphic_input(*exprs: Expr) -> None:
    """Gate for checks whose statement assumes holomorphic input.

    Raises:
        NotApplicableError: some input contains conj; the suite runner
            records it as a not_applicable report
    """
    if not all(e.holomorphic for e in exprs):
        reason = "factor contains conj" if len(exprs) > 1 else "input contains conj"
        raise NotApplicableError(reason)


def check_cr(f: Expr, grid: GridSpec, tol: Optional[float] = None, name: str = "cr") -> CheckReport:
    """Both Cauchy-Riemann residuals from exact jets over the grid.

    Non-holomorphic input is still measured; the report fails and notes
    that the check does not apply.
    """
    tol = _exact_tolerance(tol)
    sweep = _cr_sweep(f, grid_points(grid))
    details = _sweep_details(sweep)
    if not f.holomorphic:
        details["not_applicable"] = "input contains conj"
    return CheckReport.from_metric(
        name,
        sweep.final_metric,
        sweep.tolerance(tol),
        sweep.tested,
        details=details,
        measurements={"max_residual": sweep.raw, "skipped": sweep.skipped},
    )


def check_product_closure(
    f: Expr,
    f2: Expr,
    grid: GridSpec,
    tol: Optional[float] = None,
    require_holomorphic: bool = True,
    name: str = "product_closure",
) -> CheckReport:
    """CR on f*f2 plus the component and product-rule identities of the factors.

    Components: Re(f f2) = u u' - v v', Im(f f2) = u v' + u' v.
    Product rule: d_theta of those components, expanded through the factor
    jets, equals +/- sin(phi) times the expanded d_phi of the other one.
    """
    tol = _exact_tolerance(tol)
    if require_holomorphic:
        require_holomorphic_input(f, f2)

    product = Mul(f, f2)
    sweep = _Sweep()
    component_max = 0.0
    expansion_max = 0.0
    for p in grid_points(grid):
        try:
            jf = evaluate_jet(f, p)
            jg = evaluate_jet(f2, p)
            jp = evaluate_jet(product, p)
        except SingularValueError:
            sweep.skipped += 1
            continue
        s = math.sin(p.phi)
        u, v = jf.value.real, jf.value.imag
        u2, v2 = jg.value.real, jg.value.imag
        component = max(
            abs(jp.value.real - (u * u2 - v * v2)),
            abs(jp.value.imag - (u * v2 + u2 * v)),
        )

        ut, up, vt, vp = jf.d_theta.real, jf.d_phi.real, jf.d_theta.imag, jf.d_phi.imag
        u2t, u2p, v2t, v2p = jg.d_theta.real, jg.d_phi.real, jg.d_theta.imag, jg.d_phi.imag
        dt_u = ut * u2 + u2t * u - vt * v2 - v2t * v
        dp_u = up * u2 + u2p * u - vp * v2 - v2p * v
        dt_v = ut * v2 + u2t * v + vt * u2 + v2t * u
        dp_v = up * v2 + u2p * v + vp * u2 + v2p * u
        expansion = max(abs(dt_u - s * dp_v), abs(dt_v + s * dp_u))

        cr = max(_d_residuals(jp, s))
        scale = 1.0 + abs(jp.value)
        component_max = max(component_max, component / scale)
        expansion_max = max(expansion_max, expansion / scale)
        sweep.record(max(cr, component, expansion), abs(jp.value))
        sweep.branch_points += log_branch_hits(product, p)

    return CheckReport.from_metric(
        name,
        sweep.final_metric,
        sweep.tolerance(tol),
        sweep.tested,
        details=_sweep_details(
            sweep, component_residual=component_max, expansion_residual=expansion_max
        ),
        measurements={"max_residual": sweep.raw, "skipped": sweep.skipped},
    )


def check_inverse_closure(
    f: Expr,
    grid: GridSpec,
    tol: Optional[float] = None,
    skip_below: float = INVERSE_SKIP_BELOW,
    require_holomorphic: bool = True,
    name: str = "inverse_closure",
) -> CheckReport:
    """CR on 1/f, skipping grid points where |f| < skip_below."""
    tol = _exact_tolerance(tol)
    if require_holomorphic:
        require_holomorphic_input(f)

    points = grid_points(grid)
    near_zero = 0
    kept = []
    for p in points:
        try:
            if abs(evaluate(f, p)) < skip_below:
                near_zero += 1
                continue
        except SingularValueError:
            near_zero += 1
            continue
        kept.append(p)

    sweep = _cr_sweep(Inv(f), kept)
    sweep.skipped += near_zero
    return CheckReport.from_metric(
        name,
        sweep.final_metric,
        sweep.tolerance(tol),
        sweep.tested,
        details=_sweep_details(sweep, near_zero_skipped=near_zero),
        measurements={"max_residual": sweep.raw, "skipped": sweep.skipped},
    )


def compose(outer: Composition, f: Expr, power: int = 2) -> Expr:
    if outer == Composition.EXP:
        return Exp(f)
    if outer == Composition.LOG:
        return Log(f)
    return IntPow(f, power)


def check_composition(
    outer: Composition,
    f: Expr,
    grid: GridSpec,
    tol: Optional[float] = None,
    power: int = 2,
    reference: Optional[Expr] = None,
    require_holomorphic: bool = True,
    name: str = "composition",
) -> CheckReport:
    """CR on outer(f); with ``reference`` also |outer(f) - reference| pointwise."""
    tol = _exact_tolerance(tol)
    if require_holomorphic:
        require_holomorphic_input(f)

    composed = compose(outer, f, power)
    points = grid_points(grid)
    sweep = _cr_sweep(composed, points)
    cr_max = sweep.raw
    identity_max = 0.0
    if reference is not None:
        for p in points:
            try:
                value = evaluate(composed, p)
                target = evaluate(reference, p)
            except SingularValueError:
                continue
            gap = abs(value - target)
            identity_max = max(identity_max, gap)
            sweep.include(gap, abs(target))

    return CheckReport.from_metric(
        name,
        sweep.final_metric,
        sweep.tolerance(tol),
        sweep.tested,
        details=_sweep_details(sweep, identity_error=identity_max, outer=outer.value),
        measurements={"max_residual": cr_max, "identity_error": identity_max},
    )


# =============================================================================
# Harmonicity and geometry
# =============================================================================


def check_harmonicity(
    f: Expr, grid: GridSpec, tol: Optional[float] = None, name: str = "harmonicity"
) -> CheckReport:
    """max(|Lambda u|, |Lambda v|) from exact second-order jets.

    For |W|^2 = t^2 the metric is max (1 + t^2)^2 over the grid.
    """
    tol = _exact_tolerance(tol)
    sweep = _Sweep()
    for p in grid_points(grid):
        try:
            laplacian = exact_angular_laplacian(f, p)
            value = evaluate(f, p)
        except SingularValueError:
            sweep.skipped += 1
            continue
        sweep.record(max(abs(laplacian.real), abs(laplacian.imag)), abs(value))
    return CheckReport.from_metric(
        name,
        sweep.final_metric,
        sweep.tolerance(tol),
        sweep.tested,
        details={
            "max_laplacian": sweep.raw,
            "relative_laplacian": sweep.relative,
            "tolerance_scale": 1.0 + sweep.magnitude,
            "skipped": sweep.skipped,
        },
        measurements={"max_laplacian": sweep.raw},
    )


def check_gradient_orthogonality(
    f: Expr, grid: GridSpec, tol: Optional[float] = None, name: str = "gradient_orthogonality"
) -> CheckReport:
    """max |grad u . grad v| with u = Re f, v = Im f.

    The tolerance scales with 1 + max |grad u| |grad v|.
    """
    tol = _exact_tolerance(tol)
    u, v = real_part(f), imag_part(f)
    sweep = _Sweep()
    for p in grid_points(grid):
        try:
            dot = exact_gradient_dot(u, v, p)
            norm_u = math.sqrt(max(exact_gradient_dot(u, u, p), 0.0))
            norm_v = math.sqrt(max(exact_gradient_dot(v, v, p), 0.0))
        except SingularValueError:
            sweep.skipped += 1
            continue
        sweep.record(abs(dot), norm_u * norm_v)
    return CheckReport.from_metric(
        name,
        sweep.final_metric,
        sweep.tolerance(tol),
        sweep.tested,
        details={
            "max_dot": sweep.raw,
            "relative_dot": sweep.relative,
            "tolerance_scale": 1.0 + sweep.magnitude,
            "skipped": sweep.skipped,
        },
        measurements={"max_dot": sweep.raw},
    )


# =============================================================================
# Finite-difference error models
# =============================================================================


def _model_report(
    name: str,
    steps: Sequence[float],
    discrepancies: Sequence[float],
    floors: Sequence[float],
    order: int,
    slack: float,
    points: int,
    extra: dict[str, object],
) -> CheckReport:
    details: dict[str, object] = dict(extra)
    details["order"] = order
    details["finest_discrepancy"] = discrepancies[-1]
    if all(d <= fl for d, fl in zip(discrepancies, floors)):
        details["model"] = "roundoff_floor"
        return CheckReport.from_metric(
            name, 0.0, slack, points, details=details,
            measurements={"finest_discrepancy": discrepancies[-1]},
        )
    model = fit_error_model(steps, [max(d, fl) for d, fl in zip(discrepancies, floors)])
    details["slope"] = model.slope
    details["constant"] = model.constant
    return CheckReport.from_metric(
        name,
        model.deficit(order),
        slack,
        points,
        details=details,
        measurements={
            "slope": model.slope,
            "constant": model.constant,
            "finest_discrepancy": discrepancies[-1],
        },
    )


def check_factorization(
    f: Angular,
    grid: GridSpec,
    steps: Sequence[float] = DEFAULT_STEPS,
    order: Optional[int] = None,
    slack: Optional[float] = None,
    name: str = "factorization",
) -> CheckReport:
    """angular_laplacian against factorized_laplacian, fitted to O(h^order)."""
    order = _order(order)
    slack = _slack(slack)
    require_stencil_room(grid, _stencil(max(steps), order), nesting=2)
    points = grid_points(grid)
    fn = as_function(f)
    magnitude = max((abs(fn(p)) for p in points), default=0.0)

    discrepancies = []
    floors = []
    laplacian_max = 0.0
    for h in steps:
        s = _stencil(h, order)
        worst = 0.0
        for p in points:
            direct = angular_laplacian(fn, p, s)
            nested = factorized_laplacian(fn, p, s)
            worst = max(worst, abs(direct - nested) / (1.0 + abs(direct)))
            laplacian_max = max(laplacian_max, abs(direct))
        discrepancies.append(worst)
        floors.append(FLOOR_FACTOR * _EPS * (1.0 + magnitude) / (h * h))

    return _model_report(
        name, steps, discrepancies, floors, order, slack, len(points),
        {"max_laplacian": laplacian_max},
    )


def _residual_model(
    solution: SeparableSolution,
    grid: GridSpec,
    radii: Sequence[float],
    steps: Sequence[float],
    order: int,
    slack: float,
    potential: Optional[Callable[[float], float]],
    exact_radial: bool,
    name: str,
) -> CheckReport:
    require_stencil_room(grid, _stencil(max(steps), order))
    nu = potential or solution.potential
    profile = solution.radial if exact_radial else RadialProfile(value=solution.radial.value)
    samples = [Point3D(r=r, angular=p) for r in radii for p in grid_points(grid)]

    discrepancies = []
    floors = []
    skipped = 0
    for h in steps:
        s = _stencil(h, order)
        worst = 0.0
        skipped = 0
        for q in samples:
            try:
                field = profile.value(q.r) * evaluate(solution.angular, q.angular)
                residual = schrodinger_residual(profile, solution.angular, nu, q, s)
            except SingularValueError:
                skipped += 1
                continue
            if abs(field) <= 1e-12:
                skipped += 1
                continue
            worst = max(worst, abs(residual) / abs(field))
        discrepancies.append(worst)
        floors.append(FLOOR_FACTOR * _EPS / (h * h))

    return _model_report(
        name, steps, discrepancies, floors, order, slack, len(samples) - skipped,
        {"max_relative_residual": max(discrepancies), "skipped": skipped},
    )


def check_schrodinger(
    rp: RadialParams,
    idx: FamilyIndex,
    grid: GridSpec,
    radii: Sequence[float] = DEFAULT_RADII,
    steps: Sequence[float] = DEFAULT_STEPS,
    order: Optional[int] = None,
    slack: Optional[float] = None,
    potential: Optional[Callable[[float], float]] = None,
    exact_radial: bool = False,
    name: str = "schrodinger",
) -> CheckReport:
    """(-Laplacian + nu) g_{k/m} relative to |g|, fitted to O(h^order).

    With ``exact_radial`` the radial derivatives are exact and only the
    angular Laplacian is differenced.
    """
    return _residual_model(
        g_km(rp, idx), grid, radii, steps, _order(order), _slack(slack),
        potential, exact_radial, name,
    )


def check_associated_solution(
    rp: RadialParams,
    h: Expr,
    grid: GridSpec,
    radii: Sequence[float] = DEFAULT_RADII,
    steps: Sequence[float] = DEFAULT_STEPS,
    order: Optional[int] = None,
    slack: Optional[float] = None,
    name: str = "associated_solution",
) -> CheckReport:
    """Residual model for e^{-n r} h with an arbitrary angular h."""
    return _residual_model(
        associated_solution(rp, h), grid, radii, steps, _order(order), _slack(slack),
        None, False, name,
    )


# =============================================================================
# Integrals
# =============================================================================


def check_phi_integral(
    idx: FamilyIndex,
    tol: float = 1e-8,
    exponent_shift: float = 0.0,
    name: str = "phi_integral",
) -> CheckReport:
    """|quadrature - 2k pi/(m sin(k pi/m))| <= tol |closed form|.

    ``exponent_shift`` perturbs the integrand exponent away from k/m.
    """
    a = (0.0 if idx.is_limit else idx.alpha) + exponent_shift
    closed = phi_integral_closed_form(idx)
    result = integrate_phi_singular(
        lambda phi: math.tan(0.5 * phi) ** (2.0 * a) * math.sin(phi),
        PhiSingularity.power(a),
    )
    metric = abs(result.value - closed) / abs(closed)
    return CheckReport.from_metric(
        name,
        metric,
        tol,
        result.evaluations,
        details={
            "closed_form": closed,
            "quadrature": result.value,
            "error_estimate": result.abs_error_estimate,
        },
        measurements={"closed_form": closed, "quadrature": result.value},
    )


def check_unit_norm(
    rp: RadialParams,
    idx: FamilyIndex,
    tol: float = 1e-6,
    normalized: bool = True,
    name: str = "unit_norm",
) -> CheckReport:
    """|r3_norm_sq(g_{k/m}) - 1| <= tol; ``normalized=False`` drops the constant."""
    solution = g_km(rp, idx)
    if not normalized:
        solution = dataclasses.replace(solution, constant=1.0)
    result = r3_norm_sq(solution, solution.singularity, solution.decay_rate)
    return CheckReport.from_metric(
        name,
        abs(result.value - 1.0),
        tol,
        result.evaluations,
        details={
            "norm_sq": result.value,
            "error_estimate": result.abs_error_estimate,
            "constant": solution.constant,
        },
        measurements={"norm_sq": result.value},
    )


# =============================================================================
# Randomized and structural checks
# =============================================================================


def check_random_holomorphy(
    seed: int,
    n_exprs: int = 200,
    n_points: int = 100,
    depth: int = 6,
    tol: Optional[float] = None,
    margin: float = 0.2,
    conjugate: bool = False,
    name: str = "random_holomorphy",
) -> CheckReport:
    """max |D f| / (1 + |f|) over seeded random holomorphic trees and points.

    Points where f is singular, huge or ill-conditioned for the D
    cancellation are skipped and counted. ``conjugate`` wraps every tree in
    Conj, which must make the check fail.
    """
    tol = _exact_tolerance(tol)
    rng = np.random.default_rng(seed)
    exprs = [random_holomorphic_expr(rng, depth) for _ in range(n_exprs)]
    if conjugate:
        exprs = [Conj(e) for e in exprs]
    points = random_points(rng, n_points, margin)

    sweep = _Sweep()
    for e in exprs:
        for p in points:
            try:
                jet = evaluate_jet(e, p)
            except (SingularValueError, OverflowError):
                sweep.skipped += 1
                continue
            s = math.sin(p.phi)
            magnitude = abs(jet.value)
            condition = (abs(jet.d_theta) + s * abs(jet.d_phi)) / (1.0 + magnitude)
            if magnitude > MAX_MAGNITUDE or condition > MAX_CONDITION:
                sweep.skipped += 1
                continue
            d = jet.d_theta + 1j * s * jet.d_phi
            sweep.record(abs(d), magnitude)

    return CheckReport.from_metric(
        name,
        sweep.relative if sweep.tested else math.inf,
        tol,
        sweep.tested,
        details={"expressions": n_exprs, "max_abs_d": sweep.raw, "skipped": sweep.skipped},
        measurements={"max_abs_d": sweep.raw, "skipped": sweep.skipped},
    )


def check_margin_monotonicity(
    grid: GridSpec,
    f: Optional[Expr] = None,
    factors: Sequence[float] = (1.0, 0.5, 0.25),
    tol: Optional[float] = None,
    name: str = "margin_monotonicity",
) -> CheckReport:
    """CR residual of a non-holomorphic f may only grow as margins shrink.

    ``factors`` scale both margins in order; the metric is the largest
    relative decrease between consecutive steps.
    """
    f = Conj(W_MAP) if f is None else f
    residuals = [
        check_cr(f, spec, tol).measurements["max_residual"]
        for spec in shrinking_margins(grid, factors)
    ]
    decrease = max(
        (max(0.0, (a - b) / (1.0 + a)) for a, b in zip(residuals, residuals[1:])),
        default=0.0,
    )
    return CheckReport.from_metric(
        name,
        decrease,
        0.0,
        len(residuals) * grid.size,
        details={
            "factors": ",".join(format(x, "g") for x in factors),
            "residuals": ",".join(format(x, ".6g") for x in residuals),
        },
        measurements={f"residual_{i}": r for i, r in enumerate(residuals)},
    )
