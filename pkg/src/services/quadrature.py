"""
Integrators for the three coordinate directions.

- theta: equally spaced midpoint nodes (trapezoid rule shifted off the cut),
  spectrally accurate for smooth periodic integrands.
- phi: the substitution t = tan(phi/2), split at t = 1 and reflected so both
  poles sit at the origin of a unit interval, followed by adaptive bisection.
  Panels touching a pole use Gauss-Jacobi rules whose weight carries the
  declared endpoint power exactly; all other panels use Gauss-Legendre.
- r: truncation at a radius where the exponential envelope bounds the tail,
  then the same adaptive engine on (0, R).

Every panel is integrated with a 10- and a 20-point rule; the 20-point value
is kept and the difference is the panel error. The panel with the largest
error is bisected until the summed error meets the target. Sums run over
panels in interval order, so results do not depend on refinement history.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from src.core.config import get_settings
from src.core.exceptions import DomainError, NoConvergenceError
from src.core.logging import get_logger
from src.schemas.geometry import TWO_PI, AngularPoint, Point3D
from src.schemas.quadrature import REGULAR, PhiSingularity, QuadratureResult

logger = get_logger(__name__)

RealFunction = Callable[[float], float]
SphereFunction = Callable[[AngularPoint], float]
SpaceFunction = Callable[[Point3D], complex]

LOW_ORDER = 10
HIGH_ORDER = 20
PANEL_COST = LOW_ORDER + HIGH_ORDER

# Summed panel errors below this multiple of eps * sum|panel| are roundoff.
ROUNDOFF_FACTOR = 64.0
ENVELOPE_SAMPLES = 48

_EPS = float(np.finfo(float).eps)


# =============================================================================
# Adaptive panel engine
# =============================================================================


@lru_cache(maxsize=None)
def _reference_rule(n: int, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1] for the weight (1 + x)^beta."""
    if beta == 0.0:
        return roots_legendre(n)
    return roots_jacobi(n, 0.0, beta)


def _panel_rule(a: float, b: float, n: int, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes in (a, b) and weights for the plain integrand.

    A nonzero beta is only used on panels starting at 0, where the Jacobi
    weight absorbs x**beta and the returned weights divide it back out.
    """
    x, w = _reference_rule(n, beta)
    half = 0.5 * (b - a)
    nodes = a + half * (1.0 + x)
    if beta == 0.0:
        return nodes, half * w
    return nodes, half ** (beta + 1.0) * w / nodes**beta


def _sample(f: RealFunction, nodes: np.ndarray) -> np.ndarray:
    values = np.array([f(float(x)) for x in nodes], dtype=float)
    if not np.all(np.isfinite(values)):
        raise NoConvergenceError("integrand returned a non-finite value", evaluations=len(nodes))
    return values


@dataclass(frozen=True, slots=True)
class _Segment:
    """Integrand in a local variable x on [0, length], behaving like x**beta at 0."""

    integrand: RealFunction
    length: float
    beta: float = 0.0


@dataclass(frozen=True, slots=True)
class _Panel:
    segment: int
    a: float
    b: float
    value: float
    error: float
    nodes: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True, slots=True)
class CompositeRule:
    """Converged panel set; nodes and weights are those of the 20-point rules."""

    value: float
    error: float
    evaluations: int
    panels: tuple[_Panel, ...]

    def segment_rule(self, segment: int) -> tuple[np.ndarray, np.ndarray]:
        chosen = [p for p in self.panels if p.segment == segment]
        if not chosen:
            return np.empty(0), np.empty(0)
        return (
            np.concatenate([p.nodes for p in chosen]),
            np.concatenate([p.weights for p in chosen]),
        )

    def to_result(self) -> QuadratureResult:
        return QuadratureResult(
            value=self.value,
            abs_error_estimate=self.error,
            evaluations=max(self.evaluations, 1),
        )


def _evaluate_panel(segments: Sequence[_Segment], index: int, a: float, b: float) -> _Panel:
    segment = segments[index]
    beta = segment.beta if a == 0.0 else 0.0
    low_nodes, low_weights = _panel_rule(a, b, LOW_ORDER, beta)
    high_nodes, high_weights = _panel_rule(a, b, HIGH_ORDER, beta)
    low = math.fsum(low_weights * _sample(segment.integrand, low_nodes))
    high = math.fsum(high_weights * _sample(segment.integrand, high_nodes))
    return _Panel(index, a, b, high, abs(high - low), high_nodes, high_weights)


def _adaptive_integrate(
    segments: Sequence[_Segment],
    rel_tol: float,
    abs_tol: float = 0.0,
    max_panels: Optional[int] = None,
) -> CompositeRule:
    """Bisect the worst panel until sum(errors) <= max(rel_tol*|value|, abs_tol).

    Raises:
        NoConvergenceError: panel budget exhausted, with the partial value
    """
    budget = max_panels or get_settings().quad_max_panels
    panels = [
        _evaluate_panel(segments, i, 0.0, segment.length)
        for i, segment in enumerate(segments)
        if segment.length > 0.0
    ]
    evaluations = PANEL_COST * len(panels)

    while True:
        value = math.fsum(p.value for p in panels)
        error = math.fsum(p.error for p in panels)
        floor = ROUNDOFF_FACTOR * _EPS * math.fsum(abs(p.value) for p in panels)
        if error <= max(rel_tol * abs(value), abs_tol, floor):
            return CompositeRule(value, error, evaluations, tuple(panels))

        worst = max(range(len(panels)), key=lambda i: panels[i].error)
        panel = panels[worst]
        too_narrow = panel.b - panel.a <= 1e-15 * segments[panel.segment].length
        if len(panels) >= budget or too_narrow:
            raise NoConvergenceError(
                f"adaptive quadrature stopped after {len(panels)} panels "
                f"with error {error:.3e}",
                partial_value=value,
                error_estimate=error,
                evaluations=evaluations,
            )

        mid = 0.5 * (panel.a + panel.b)
        panels[worst : worst + 1] = [
            _evaluate_panel(segments, panel.segment, panel.a, mid),
            _evaluate_panel(segments, panel.segment, mid, panel.b),
        ]
        evaluations += 2 * PANEL_COST


# =============================================================================
# theta
# =============================================================================


def theta_nodes(n_nodes: int) -> np.ndarray:
    """Midpoint nodes (j + 1/2) * 2*pi/n; none of them touches the cut."""
    return (np.arange(n_nodes) + 0.5) * (TWO_PI / n_nodes)


def integrate_theta(f: RealFunction, n_nodes: Optional[int] = None) -> QuadratureResult:
    """Integral of a 2*pi-periodic function over (0, 2*pi).

    The error estimate compares against the rule on every other node (or a
    fresh half-size rule when n_nodes is odd).
    """
    n = n_nodes or get_settings().quad_theta_nodes
    if n < 4:
        raise DomainError(f"n_nodes={n} must be >= 4", details={"n_nodes": n})

    step = TWO_PI / n
    values = _sample(f, theta_nodes(n))
    value = step * math.fsum(values)
    evaluations = n
    if n % 2 == 0:
        coarse = 2.0 * step * math.fsum(values[::2])
    else:
        half = n // 2
        coarse = (TWO_PI / half) * math.fsum(_sample(f, theta_nodes(half)))
        evaluations += half

    return QuadratureResult(
        value=value,
        abs_error_estimate=abs(value - coarse),
        evaluations=evaluations,
    )


# =============================================================================
# phi
# =============================================================================


def _phi_segments(f: RealFunction, sing: PhiSingularity) -> tuple[_Segment, _Segment]:
    def near_zero(t: float) -> float:
        return f(2.0 * math.atan(t)) * 2.0 / (1.0 + t * t)

    def near_pi(s: float) -> float:
        return f(math.pi - 2.0 * math.atan(s)) * 2.0 / (1.0 + s * s)

    return (
        _Segment(near_zero, 1.0, sing.beta_at_0),
        _Segment(near_pi, 1.0, sing.beta_at_pi),
    )


def _phi_rule(
    f: RealFunction,
    sing: PhiSingularity,
    tol: float,
    max_panels: Optional[int] = None,
) -> CompositeRule:
    return _adaptive_integrate(_phi_segments(f, sing), rel_tol=tol, max_panels=max_panels)


def _phi_nodes(rule: CompositeRule) -> tuple[np.ndarray, np.ndarray]:
    """The converged rule as nodes and weights in phi."""
    t, wt = rule.segment_rule(0)
    s, ws = rule.segment_rule(1)
    # Same expressions as _phi_segments so theta errors can be looked up by node.
    phis = np.array(
        [2.0 * math.atan(x) for x in t] + [math.pi - 2.0 * math.atan(x) for x in s]
    )
    weights = np.concatenate([wt * 2.0 / (1.0 + t * t), ws * 2.0 / (1.0 + s * s)])
    return phis, weights


def integrate_phi_singular(
    f: RealFunction,
    sing: PhiSingularity = REGULAR,
    tol: Optional[float] = None,
    max_panels: Optional[int] = None,
) -> QuadratureResult:
    """Integral of f over (0, pi) for f ~ tan(phi/2)^(2a) sin(phi) at the ends.

    Raises:
        NoConvergenceError: subdivision budget exhausted
    """
    tol = get_settings().quad_tolerance if tol is None else tol
    result = _phi_rule(f, sing, tol, max_panels).to_result()
    logger.debug(
        "quadrature_completed",
        integrator="phi",
        value=result.value,
        error=result.abs_error_estimate,
        evaluations=result.evaluations,
    )
    return result


# =============================================================================
# r
# =============================================================================


def _tail_bound(c: float, rate: float, radius: float) -> float:
    """Integral of c r^2 e^{-rate r} over (radius, inf)."""
    return (
        c
        * math.exp(-rate * radius)
        * (radius * radius / rate + 2.0 * radius / rate**2 + 2.0 / rate**3)
    )


def _truncation_radius(f: RealFunction, rate: float, target: float) -> tuple[float, float]:
    """Radius R and tail bound <= target from a sampled r^2 e^{-rate r} envelope."""
    lo, hi = min(1.0, 1.0 / rate), max(1.0, 40.0 / rate)
    samples = np.linspace(lo, hi, ENVELOPE_SAMPLES)
    ratios = [abs(f(float(r))) / (r * r * math.exp(-rate * r)) for r in samples]
    c = 2.0 * max(ratios)
    if not math.isfinite(c):
        raise NoConvergenceError("radial envelope is not finite", evaluations=ENVELOPE_SAMPLES)

    radius = max(1.0, 1.0 / rate)
    tail = _tail_bound(c, rate, radius)
    for _ in range(100_000):
        if tail <= target:
            return radius, tail
        radius += 1.0 / rate
        tail = _tail_bound(c, rate, radius)
    raise NoConvergenceError(
        "no truncation radius meets the tail target",
        error_estimate=tail,
        evaluations=ENVELOPE_SAMPLES,
    )


def integrate_radial(
    f: RealFunction,
    decay_rate: float,
    tol: Optional[float] = None,
    max_panels: Optional[int] = None,
) -> QuadratureResult:
    """Integral of f over (0, inf) for |f(r)| <= C r^2 e^{-decay_rate r}.

    Half of ``tol`` goes to the truncated tail, half to the adaptive rule on
    (0, R); both are absolute.
    """
    if not decay_rate > 0.0:
        raise DomainError(f"decay_rate={decay_rate} must be > 0", details={"decay_rate": decay_rate})
    tol = get_settings().quad_tolerance if tol is None else tol

    radius, tail = _truncation_radius(f, decay_rate, 0.5 * tol)
    rule = _adaptive_integrate(
        (_Segment(f, radius),), rel_tol=0.0, abs_tol=0.5 * tol, max_panels=max_panels
    )
    result = QuadratureResult(
        value=rule.value,
        abs_error_estimate=rule.error + tail,
        evaluations=rule.evaluations + ENVELOPE_SAMPLES,
    )
    logger.debug(
        "quadrature_completed",
        integrator="radial",
        value=result.value,
        error=result.abs_error_estimate,
        truncation_radius=radius,
        evaluations=result.evaluations,
    )
    return result


# =============================================================================
# Products
# =============================================================================


@dataclass(frozen=True, slots=True)
class AngularRule:
    """Points of the sphere with weights that include sin(phi)."""

    points: tuple[AngularPoint, ...]
    weights: tuple[float, ...]
    result: QuadratureResult

    @property
    def relative_error(self) -> float:
        if self.result.value == 0.0:
            return 0.0
        return self.result.abs_error_estimate / abs(self.result.value)


def _sphere_rule(
    F: SphereFunction,
    sing: PhiSingularity,
    n_theta: Optional[int],
    tol: float,
) -> AngularRule:
    n = n_theta or get_settings().quad_theta_nodes
    theta_errors: dict[float, float] = {}
    calls = 0

    def profile(phi: float) -> float:
        nonlocal calls
        inner = integrate_theta(lambda theta: F(AngularPoint(theta=theta, phi=phi)), n)
        theta_errors[phi] = inner.abs_error_estimate
        calls += inner.evaluations
        return math.sin(phi) * inner.value

    rule = _phi_rule(profile, sing, tol)
    phis, phi_weights = _phi_nodes(rule)
    sines = np.sin(phis)
    theta_error = math.fsum(
        abs(w) * s * theta_errors.get(float(phi), 0.0)
        for phi, w, s in zip(phis, phi_weights, sines)
    )

    step = TWO_PI / n
    thetas = theta_nodes(n)
    points = []
    weights = []
    for phi, w, s in zip(phis, phi_weights, sines):
        for theta in thetas:
            points.append(AngularPoint(theta=float(theta), phi=float(phi)))
            weights.append(float(w * s * step))

    result = QuadratureResult(
        value=rule.value,
        abs_error_estimate=rule.error + theta_error,
        evaluations=max(calls, 1),
    )
    return AngularRule(tuple(points), tuple(weights), result)


def sphere_integral(
    F: SphereFunction,
    sing: PhiSingularity = REGULAR,
    n_theta: Optional[int] = None,
    tol: Optional[float] = None,
) -> QuadratureResult:
    """Integral of F over the unit sphere, sin(phi) dphi dtheta.

    The phi rule adapts to the theta-integrated profile; theta errors at the
    final phi nodes are added to the phi error.
    """
    tol = get_settings().quad_tolerance if tol is None else tol
    return _sphere_rule(F, sing, n_theta, tol).result


def r3_norm_sq(
    G: SpaceFunction,
    sing: PhiSingularity,
    decay_rate: float,
    tol: Optional[float] = None,
    n_theta: Optional[int] = None,
) -> QuadratureResult:
    """Squared L2 norm of G over R^3, with |G| ~ e^{-decay_rate r} at large r.

    The angular rule is adapted once on |G|^2 at the reference radius
    1/decay_rate and then reused on every radial shell, which is exact for
    separable G and an approximation otherwise.
    """
    if not decay_rate > 0.0:
        raise DomainError(f"decay_rate={decay_rate} must be > 0", details={"decay_rate": decay_rate})
    tol = get_settings().quad_tolerance if tol is None else tol

    r_ref = 1.0 / decay_rate
    angular = _sphere_rule(
        lambda p: abs(G(Point3D(r=r_ref, angular=p))) ** 2, sing, n_theta, tol
    )

    def shell(r: float) -> float:
        total = math.fsum(
            w * abs(G(Point3D(r=r, angular=p))) ** 2
            for p, w in zip(angular.points, angular.weights)
        )
        return r * r * total

    radial = integrate_radial(shell, 2.0 * decay_rate, tol)
    value = radial.value
    result = QuadratureResult(
        value=value,
        abs_error_estimate=radial.abs_error_estimate + abs(value) * angular.relative_error,
        evaluations=angular.result.evaluations + radial.evaluations * len(angular.points),
    )
    logger.debug(
        "quadrature_completed",
        integrator="r3_norm_sq",
        value=result.value,
        error=result.abs_error_estimate,
        angular_points=len(angular.points),
        evaluations=result.evaluations,
    )
    return result
