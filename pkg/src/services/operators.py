"""
Differential operators on the cut sphere and on separable fields in R^3.

Every operator exists twice: a central finite-difference version that only
needs point values (black-box callables or expressions), and an exact
version that reads the second-order jet of an expression. Checks compare
the two paths.

    D    = d_theta + i sin(phi) d_phi
    Dbar = d_theta - i sin(phi) d_phi
    Lambda = (1/sin^2 phi) d_theta^2 + d_phi^2 + cot(phi) d_phi
           = (1/sin^2 phi) Dbar D
"""

import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Sequence, Union

import numpy as np

from src.core.exceptions import DegenerateSequenceError, DomainError
from src.expr.evaluate import evaluate, evaluate_jet, symbolic_d, symbolic_dbar
from src.expr.nodes import Expr
from src.schemas.geometry import AngularPoint, Point3D
from src.schemas.operators import ErrorModel, StencilSpec

AngularFunction = Callable[[AngularPoint], complex]
Angular = Union[Expr, AngularFunction]
RadialFunction = Callable[[float], float]

# Integer numerators over a common denominator keep constants exact.
_FIRST: dict[int, tuple[tuple[tuple[int, int], ...], int]] = {
    2: (((-1, -1), (1, 1)), 2),
    4: (((-2, 1), (-1, -8), (1, 8), (2, -1)), 12),
}
_SECOND: dict[int, tuple[tuple[tuple[int, int], ...], int]] = {
    2: (((-1, 1), (0, -2), (1, 1)), 1),
    4: (((-2, -1), (-1, 16), (0, -30), (1, 16), (2, -1)), 12),
}

# Errors below this multiple of eps * (1 + |reference|) are roundoff.
FLOOR_FACTOR = 64.0
_EPS = float(np.finfo(float).eps)


def as_function(f: Angular) -> AngularFunction:
    """Point evaluator for an expression or a callable."""
    if isinstance(f, Expr):
        expr = f
        return lambda p: evaluate(expr, p)
    return f


# =============================================================================
# Stencils
# =============================================================================


def check_footprint(p: AngularPoint, s: StencilSpec, nesting: int = 1) -> None:
    """Refuse stencils reaching past half the distance to the cut or a pole.

    Raises:
        DomainError: the (possibly nested) stencil is too wide at p
    """
    reach_theta = nesting * s.reach * s.h_theta
    reach_phi = nesting * s.reach * s.h_phi
    if reach_theta > 0.5 * p.boundary_distance_theta:
        raise DomainError(
            f"theta stencil reach {reach_theta:.3g} exceeds half the distance to the cut",
            details={"theta": p.theta, "reach": reach_theta},
        )
    if reach_phi > 0.5 * p.boundary_distance_phi:
        raise DomainError(
            f"phi stencil reach {reach_phi:.3g} exceeds half the distance to a pole",
            details={"phi": p.phi, "reach": reach_phi},
        )


def _difference(
    g: Callable[[float], complex],
    x: float,
    h: float,
    weights: tuple[tuple[tuple[int, int], ...], int],
    power: int,
) -> complex:
    offsets, denominator = weights
    total = sum(c * g(x + j * h) for j, c in offsets)
    return total / (denominator * h**power)


def _theta_derivative(f: AngularFunction, p: AngularPoint, s: StencilSpec, second: bool = False) -> complex:
    table = _SECOND if second else _FIRST
    return _difference(
        lambda th: f(AngularPoint(theta=th, phi=p.phi)),
        p.theta,
        s.h_theta,
        table[s.order],
        2 if second else 1,
    )


def _phi_derivative(f: AngularFunction, p: AngularPoint, s: StencilSpec, second: bool = False) -> complex:
    table = _SECOND if second else _FIRST
    return _difference(
        lambda ph: f(AngularPoint(theta=p.theta, phi=ph)),
        p.phi,
        s.h_phi,
        table[s.order],
        2 if second else 1,
    )


# =============================================================================
# Finite-difference operators
# =============================================================================


def apply_d(f: Angular, p: AngularPoint, s: StencilSpec) -> complex:
    """Central-difference D f at p."""
    check_footprint(p, s)
    fn = as_function(f)
    return _theta_derivative(fn, p, s) + 1j * math.sin(p.phi) * _phi_derivative(fn, p, s)


def apply_dbar(f: Angular, p: AngularPoint, s: StencilSpec) -> complex:
    """Central-difference Dbar f at p."""
    check_footprint(p, s)
    fn = as_function(f)
    return _theta_derivative(fn, p, s) - 1j * math.sin(p.phi) * _phi_derivative(fn, p, s)


def angular_laplacian(f: Angular, p: AngularPoint, s: StencilSpec) -> complex:
    """Three-term angular Laplacian from second differences."""
    check_footprint(p, s)
    fn = as_function(f)
    sin_phi = math.sin(p.phi)
    return (
        _theta_derivative(fn, p, s, second=True) / (sin_phi * sin_phi)
        + _phi_derivative(fn, p, s, second=True)
        + math.cos(p.phi) / sin_phi * _phi_derivative(fn, p, s)
    )


def factorized_laplacian(f: Angular, p: AngularPoint, s: StencilSpec) -> complex:
    """(1/sin^2 phi) Dbar(D f) with nested first-difference stencils."""
    check_footprint(p, s, nesting=2)
    fn = as_function(f)
    sin_phi = math.sin(p.phi)
    return apply_dbar(lambda q: apply_d(fn, q, s), p, s) / (sin_phi * sin_phi)


def gradient_dot(a: Angular, b: Angular, p: AngularPoint, s: StencilSpec) -> float:
    """Unit-sphere metric product d_phi a d_phi b + (1/sin^2 phi) d_theta a d_theta b."""
    check_footprint(p, s)
    fa = as_function(a)
    fb = as_function(b)
    sin_phi = math.sin(p.phi)
    a_theta = _theta_derivative(fa, p, s).real
    a_phi = _phi_derivative(fa, p, s).real
    b_theta = _theta_derivative(fb, p, s).real
    b_phi = _phi_derivative(fb, p, s).real
    return a_phi * b_phi + a_theta * b_theta / (sin_phi * sin_phi)


# =============================================================================
# Exact-jet operators
# =============================================================================


def exact_angular_laplacian(e: Expr, p: AngularPoint) -> complex:
    jet = evaluate_jet(e, p)
    sin_phi = math.sin(p.phi)
    return (
        jet.d_theta_theta / (sin_phi * sin_phi)
        + jet.d_phi_phi
        + math.cos(p.phi) / sin_phi * jet.d_phi
    )


def exact_factorized_laplacian(e: Expr, p: AngularPoint) -> complex:
    """(1/sin^2 phi) Dbar(D e), differentiating D e = e_theta + i sin(phi) e_phi."""
    jet = evaluate_jet(e, p)
    sin_phi, cos_phi = math.sin(p.phi), math.cos(p.phi)
    d_theta_of_d = jet.d_theta_theta + 1j * sin_phi * jet.d_theta_phi
    d_phi_of_d = jet.d_theta_phi + 1j * (cos_phi * jet.d_phi + sin_phi * jet.d_phi_phi)
    return (d_theta_of_d - 1j * sin_phi * d_phi_of_d) / (sin_phi * sin_phi)


def exact_gradient_dot(a: Expr, b: Expr, p: AngularPoint) -> float:
    """gradient_dot from exact jets of two real-valued expressions."""
    ja = evaluate_jet(a, p)
    jb = evaluate_jet(b, p)
    sin_phi = math.sin(p.phi)
    return (
        ja.d_phi.real * jb.d_phi.real
        + ja.d_theta.real * jb.d_theta.real / (sin_phi * sin_phi)
    )


# =============================================================================
# Separable fields in R^3
# =============================================================================


@dataclass(frozen=True, slots=True)
class RadialProfile:
    """Radial factor g(r), optionally with exact g' and g''."""

    value: RadialFunction
    first: Optional[RadialFunction] = None
    second: Optional[RadialFunction] = None

    def derivatives(self, r: float, s: StencilSpec) -> tuple[float, float, float]:
        """g, g', g'' at r; missing derivatives come from central differences."""
        g = self.value(r)
        if self.first is not None and self.second is not None:
            return g, self.first(r), self.second(r)
        h = s.radial_step
        if s.reach * h > 0.5 * r:
            raise DomainError(
                f"radial stencil reach {s.reach * h:.3g} exceeds r/2 at r={r}",
                details={"r": r, "h_r": h},
            )
        first = (
            self.first(r)
            if self.first is not None
            else _difference(self.value, r, h, _FIRST[s.order], 1).real
        )
        second = (
            self.second(r)
            if self.second is not None
            else _difference(self.value, r, h, _SECOND[s.order], 2).real
        )
        return g, first, second


def laplacian3d_separable(g: RadialProfile, h: Angular, q: Point3D, s: StencilSpec) -> complex:
    """Laplacian of g(r) h(theta, phi): h (g'' + 2g'/r) + g Lambda h / r^2."""
    r = q.r
    g0, g1, g2 = g.derivatives(r, s)
    h_value = as_function(h)(q.angular)
    return h_value * (g2 + 2.0 * g1 / r) + g0 * angular_laplacian(h, q.angular, s) / (r * r)


def schrodinger_residual(
    g: RadialProfile,
    h: Angular,
    potential: RadialFunction,
    q: Point3D,
    s: StencilSpec,
) -> complex:
    """(-Laplacian + nu)(g h) at q."""
    field = g.value(q.r) * as_function(h)(q.angular)
    return -laplacian3d_separable(g, h, q, s) + potential(q.r) * field


# =============================================================================
# Convergence
# =============================================================================


def fit_error_model(steps: Sequence[float], errors: Sequence[float]) -> ErrorModel:
    """Least-squares fit of log(error) = log(constant) + slope log(h).

    Raises:
        DegenerateSequenceError: a zero error, or fewer than two steps
    """
    if len(steps) < 2 or len(steps) != len(errors):
        raise DegenerateSequenceError("need at least two (step, error) pairs")
    if min(errors) <= 0.0:
        raise DegenerateSequenceError()
    slope, intercept = np.polyfit(np.log(steps), np.log(errors), 1)
    return ErrorModel(
        slope=float(slope),
        constant=float(math.exp(intercept)),
        steps=list(steps),
        errors=list(errors),
    )


_EXACT: dict[Callable[..., complex], Callable[[Expr, AngularPoint], complex]] = {
    apply_d: symbolic_d,
    apply_dbar: symbolic_dbar,
    angular_laplacian: exact_angular_laplacian,
    factorized_laplacian: exact_factorized_laplacian,
}


def convergence_order(
    op: Callable[[Angular, AngularPoint, StencilSpec], complex],
    f: Angular,
    p: AngularPoint,
    h_sequence: Sequence[float],
    order: Literal[2, 4] = 2,
    reference: Optional[complex] = None,
) -> float:
    """Observed order of ``op`` at p against the exact-jet value.

    ``reference`` replaces the exact value for black-box callables.

    Raises:
        DegenerateSequenceError: errors at the machine floor, or a step
            sequence that is shorter than three or does not halve
    """
    steps = list(h_sequence)
    if len(steps) < 3 or any(
        not math.isclose(b, 0.5 * a, rel_tol=1e-9) for a, b in zip(steps, steps[1:])
    ):
        raise DegenerateSequenceError("need at least three halving steps")
    if reference is None:
        if not isinstance(f, Expr) or op not in _EXACT:
            raise DegenerateSequenceError("no exact reference for this operator and input")
        reference = _EXACT[op](f, p)

    errors = [abs(op(f, p, StencilSpec.uniform(h, order=order)) - reference) for h in steps]
    floor = FLOOR_FACTOR * _EPS * (1.0 + abs(reference))
    if min(errors) <= floor:
        raise DegenerateSequenceError(
            f"errors reach the machine floor ({min(errors):.3e} <= {floor:.3e})"
        )
    return fit_error_model(steps, errors).slope
