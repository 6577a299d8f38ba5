"""Seeded sampling of verification points and random holomorphic expressions."""

import math
from typing import Sequence

import numpy as np

from src.core.exceptions import DomainError
from src.expr.nodes import (
    W_MAP,
    ZETA,
    Add,
    Const,
    Exp,
    Expr,
    Hkm,
    IntPow,
    Inv,
    Log,
    Mul,
)
from src.schemas.geometry import TWO_PI, AngularPoint
from src.schemas.operators import StencilSpec
from src.schemas.verify import GridSpec

MAX_FAMILY_M = 8


def grid_points(spec: GridSpec) -> list[AngularPoint]:
    """Tensor points in [m_t, 2pi - m_t] x [m_p, pi - m_p], then the random points.

    An odd n_theta places a node at theta = pi; n = 1 uses the box centre.
    """
    thetas = _axis(spec.margin_theta, TWO_PI - spec.margin_theta, spec.n_theta)
    phis = _axis(spec.margin_phi, math.pi - spec.margin_phi, spec.n_phi)
    points = [AngularPoint(theta=float(t), phi=float(p)) for p in phis for t in thetas]
    if spec.n_random:
        rng = np.random.default_rng(spec.seed)
        rand_theta = rng.uniform(spec.margin_theta, TWO_PI - spec.margin_theta, spec.n_random)
        rand_phi = rng.uniform(spec.margin_phi, math.pi - spec.margin_phi, spec.n_random)
        points.extend(
            AngularPoint(theta=float(t), phi=float(p)) for t, p in zip(rand_theta, rand_phi)
        )
    return points


def _axis(lo: float, hi: float, n: int) -> np.ndarray:
    if n == 1:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo, hi, n)


def require_stencil_room(spec: GridSpec, s: StencilSpec, nesting: int = 1) -> None:
    """Margins must exceed twice the (nested) stencil reach.

    Raises:
        DomainError: a grid point would reject the stencil
    """
    if nesting * s.reach * s.h_theta > 0.5 * spec.margin_theta or (
        nesting * s.reach * s.h_phi > 0.5 * spec.margin_phi
    ):
        raise DomainError(
            "grid margins too small for the stencil",
            details={"margin_theta": spec.margin_theta, "margin_phi": spec.margin_phi},
        )


def shrinking_margins(spec: GridSpec, factors: Sequence[float] = (1.0, 0.5, 0.25)) -> list[GridSpec]:
    """Copies of ``spec`` with both margins scaled by each factor."""
    return [spec.with_margins(spec.margin_theta * f, spec.margin_phi * f) for f in factors]


def random_points(rng: np.random.Generator, count: int, margin: float) -> list[AngularPoint]:
    thetas = rng.uniform(margin, TWO_PI - margin, count)
    phis = rng.uniform(margin, math.pi - margin, count)
    return [AngularPoint(theta=float(t), phi=float(p)) for t, p in zip(thetas, phis)]


# =============================================================================
# Random expressions
# =============================================================================


def random_leaf(rng: np.random.Generator) -> Expr:
    choice = int(rng.integers(4))
    if choice == 0:
        re, im = rng.uniform(-2.0, 2.0, 2)
        return Const(complex(round(float(re), 3), round(float(im), 3)))
    if choice == 1:
        return ZETA
    if choice == 2:
        return W_MAP
    m = int(rng.integers(2, MAX_FAMILY_M + 1))
    k = int(rng.integers(1, m))
    sign = 1 if rng.random() < 0.75 else -1
    return Hkm(sign * k, m)


def random_holomorphic_expr(rng: np.random.Generator, depth: int) -> Expr:
    """Holomorphic tree of at most ``depth`` levels built from every node kind but Conj."""
    if depth <= 1 or rng.random() < 0.25:
        return random_leaf(rng)
    choice = int(rng.integers(6))
    if choice == 0:
        return Add(random_holomorphic_expr(rng, depth - 1), random_holomorphic_expr(rng, depth - 1))
    if choice == 1:
        return Mul(random_holomorphic_expr(rng, depth - 1), random_holomorphic_expr(rng, depth - 1))
    if choice == 3 and depth >= 3:
        # Damped so exp stays well inside the float range.
        return Exp(Mul(Const(0.25), random_holomorphic_expr(rng, depth - 2)))
    inner = random_holomorphic_expr(rng, depth - 1)
    if choice == 2:
        return Inv(inner)
    if choice == 4:
        return Log(inner)
    return IntPow(inner, int(rng.integers(-2, 4)))
