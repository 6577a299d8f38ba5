"""
The solution families of the separable Schrodinger problem.

With nu(r) = n^2 - 2n/r the radial factor e^{-n r} satisfies
g'' + (2/r) g' - nu g = 0, so for every angular holomorphic h the product
g h is a null function of (-Laplacian + nu). The family
h_{k/m} = tan(phi/2)^{k/m} e^{-i k theta/m} gives square-integrable members

    g_{k/m} = N tan(phi/2)^{k/m} e^{-(n r + i k theta/m)},
    N = (1/pi) sqrt(n^3 m sin(k pi/m) / k),

normalized to unit L2 norm on R^3. The k = 0 member is the continuous limit
(h = 1, N = sqrt(n^3/pi)).
"""

import cmath
import math
from dataclasses import dataclass
from typing import Optional

from src.core.exceptions import DomainError
from src.expr.evaluate import evaluate
from src.expr.nodes import ONE, Expr, hkm
from src.schemas.family import FamilyIndex, RadialParams
from src.schemas.geometry import Point3D
from src.schemas.quadrature import REGULAR, PhiSingularity
from src.services.operators import RadialProfile


# =============================================================================
# Radial factor
# =============================================================================


def potential_nu(rp: RadialParams, r: float) -> float:
    """nu(r) = n^2 - 2n/r."""
    if not r > 0.0:
        raise DomainError(f"r={r!r} must be > 0", details={"r": r})
    return rp.n * rp.n - 2.0 * rp.n / r


def radial_solution(rp: RadialParams, r: float) -> float:
    """e^{-n r}."""
    if r < 0.0:
        raise DomainError(f"r={r!r} must be >= 0", details={"r": r})
    return math.exp(-rp.n * r)


def radial_profile(rp: RadialParams) -> RadialProfile:
    """e^{-n r} with its exact derivatives -n g and n^2 g."""
    n = rp.n
    return RadialProfile(
        value=lambda r: radial_solution(rp, r),
        first=lambda r: -n * radial_solution(rp, r),
        second=lambda r: n * n * radial_solution(rp, r),
    )


def radial_ode_residual(rp: RadialParams, r: float) -> float:
    """g'' + (2/r) g' - nu g at r, from exact derivatives."""
    g = radial_solution(rp, r)
    n = rp.n
    return n * n * g + 2.0 / r * (-n * g) - potential_nu(rp, r) * g


# =============================================================================
# Angular family and closed forms
# =============================================================================


def h_km(idx: FamilyIndex) -> Expr:
    """The expression h_{k/m}; the k = 0 limit member is the constant 1."""
    if idx.is_limit:
        return ONE
    return hkm(idx.k, idx.m)


def phi_integral_closed_form(idx: FamilyIndex) -> float:
    """Integral of tan(phi/2)^{2k/m} sin(phi) over (0, pi): 2k pi / (m sin(k pi/m))."""
    if idx.is_limit:
        return 2.0
    return 2.0 * idx.k * math.pi / (idx.m * math.sin(idx.k * math.pi / idx.m))


def normalization_constant(rp: RadialParams, idx: FamilyIndex) -> float:
    """N such that N e^{-n r} h_{k/m} has unit L2 norm on R^3."""
    n3 = rp.n**3
    if idx.is_limit:
        return math.sqrt(n3 / math.pi)
    return math.sqrt(n3 * idx.m * math.sin(idx.k * math.pi / idx.m) / idx.k) / math.pi


# =============================================================================
# Separable solutions
# =============================================================================


@dataclass(frozen=True, slots=True)
class SeparableSolution:
    """constant * e^{-n r} * h(theta, phi) on R^3 minus the cut."""

    rp: RadialParams
    angular: Expr
    constant: float = 1.0
    index: Optional[FamilyIndex] = None

    def composed(self, q: Point3D) -> complex:
        """constant * radial_solution(r) * evaluate(angular)."""
        return self.constant * radial_solution(self.rp, q.r) * evaluate(self.angular, q.angular)

    def closed_form(self, q: Point3D) -> complex:
        """N tan(phi/2)^{k/m} e^{-(n r + i k theta/m)}; falls back to ``composed``."""
        if self.index is None:
            return self.composed(q)
        alpha = 0.0 if self.index.is_limit else self.index.alpha
        t = math.tan(0.5 * q.phi)
        return self.constant * t**alpha * cmath.exp(-complex(self.rp.n * q.r, alpha * q.theta))

    def __call__(self, q: Point3D) -> complex:
        return self.closed_form(q)

    @property
    def radial(self) -> RadialProfile:
        return radial_profile(self.rp)

    @property
    def decay_rate(self) -> float:
        """Decay rate of |g| in r."""
        return self.rp.n

    @property
    def singularity(self) -> PhiSingularity:
        """Endpoint behaviour of |g|^2, tan(phi/2)^{2k/m} at both poles."""
        if self.index is None or self.index.is_limit:
            return REGULAR
        return PhiSingularity.power(self.index.alpha)

    def potential(self, r: float) -> float:
        return potential_nu(self.rp, r)


def g_km(rp: RadialParams, idx: FamilyIndex) -> SeparableSolution:
    """The normalized member g_{k/m}."""
    return SeparableSolution(
        rp=rp,
        angular=h_km(idx),
        constant=normalization_constant(rp, idx),
        index=idx,
    )


def associated_solution(rp: RadialParams, h: Expr) -> SeparableSolution:
    """e^{-n r} h for an arbitrary angular expression h (unnormalized).

    Only holomorphic h give null functions of (-Laplacian + nu).
    """
    return SeparableSolution(rp=rp, angular=h)
