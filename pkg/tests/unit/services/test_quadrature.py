"""
Unit tests for the theta, phi and radial integrators.
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.exceptions import DomainError, NoConvergenceError
from src.schemas.family import FamilyIndex, RadialParams
from src.schemas.quadrature import REGULAR, PhiSingularity
from src.services.family import g_km, phi_integral_closed_form
from src.services.quadrature import (
    integrate_phi_singular,
    integrate_radial,
    integrate_theta,
    r3_norm_sq,
    sphere_integral,
    theta_nodes,
)

EPS = 2.0**-52
FAMILY_SWEEP = [(k, m) for m in range(2, 13) for k in range(1, m)]


def _family_integral(idx: FamilyIndex):
    a = idx.alpha
    return integrate_phi_singular(
        lambda phi: math.tan(0.5 * phi) ** (2 * a) * math.sin(phi),
        PhiSingularity.power(a),
    )


class TestThetaRule:
    """Tests for the midpoint theta rule."""

    def test_nodes_avoid_the_cut(self):
        """No node sits at 0 or 2*pi."""
        nodes = theta_nodes(8)
        assert nodes[0] == pytest.approx(math.pi / 8)
        assert nodes[-1] == pytest.approx(2 * math.pi - math.pi / 8)

    def test_trigonometric_polynomial_is_exact(self):
        """cos^2 integrates to pi."""
        result = integrate_theta(lambda t: math.cos(t) ** 2, 16)
        assert result.value == pytest.approx(math.pi, rel=1e-14)
        assert result.abs_error_estimate < 1e-12

    def test_odd_node_count_estimates_error(self):
        """Odd counts compare against a fresh half-size rule."""
        result = integrate_theta(lambda t: 1.0, 9)
        assert result.value == pytest.approx(2 * math.pi)
        assert result.evaluations == 9 + 4

    def test_too_few_nodes(self):
        """Fewer than four nodes is a domain error."""
        with pytest.raises(DomainError):
            integrate_theta(lambda t: 1.0, 3)


class TestPhiRule:
    """Tests for the endpoint-singular phi integrator."""

    def test_regular_integrand(self):
        """Integral of sin(phi) over (0, pi) is 2."""
        result = integrate_phi_singular(math.sin, REGULAR)
        assert result.value == pytest.approx(2.0, rel=1e-12)

    @pytest.mark.parametrize("k,m", FAMILY_SWEEP + [(-1, 2)])
    def test_family_integrals_match_closed_form(self, k, m):
        """Integral of tan(phi/2)^{2k/m} sin(phi) is 2k pi/(m sin(k pi/m))."""
        idx = FamilyIndex(k=k, m=m)
        result = _family_integral(idx)
        assert result.value == pytest.approx(phi_integral_closed_form(idx), rel=1e-8)

    def test_half_member_is_pi(self):
        """k/m = 1/2 gives exactly pi, in closed form and by quadrature."""
        idx = FamilyIndex(k=1, m=2)
        assert phi_integral_closed_form(idx) == pytest.approx(math.pi, abs=1e-15)
        assert _family_integral(idx).value == pytest.approx(math.pi, abs=1e-9)

    def test_error_estimates_cover_actual_error(self):
        """The estimate bounds the true error on at least 95% of the sweep."""
        honest = 0
        for k, m in FAMILY_SWEEP:
            idx = FamilyIndex(k=k, m=m)
            closed = phi_integral_closed_form(idx)
            result = _family_integral(idx)
            # the closed form itself carries a few ulps of rounding
            allowance = 64 * EPS * abs(closed)
            if abs(result.value - closed) <= result.abs_error_estimate + allowance:
                honest += 1
        assert honest >= 0.95 * len(FAMILY_SWEEP)

    @given(
        alpha=st.floats(min_value=-10.0, max_value=10.0),
        beta=st.floats(min_value=-10.0, max_value=10.0),
    )
    @settings(max_examples=25, deadline=None)
    def test_linearity(self, alpha, beta):
        """I(alpha f + beta g) = alpha I(f) + beta I(g) within the estimates."""
        sing = PhiSingularity.power(1 / 3)

        def f(phi: float) -> float:
            return math.tan(0.5 * phi) ** (2 / 3) * math.sin(phi)

        def g(phi: float) -> float:
            return f(phi) * math.cos(phi)

        both = integrate_phi_singular(lambda phi: alpha * f(phi) + beta * g(phi), sing)
        i_f = integrate_phi_singular(f, sing)
        i_g = integrate_phi_singular(g, sing)
        bound = (
            both.abs_error_estimate
            + abs(alpha) * i_f.abs_error_estimate
            + abs(beta) * i_g.abs_error_estimate
            + 1e-12 * (1.0 + abs(alpha) + abs(beta))
        )
        assert abs(both.value - (alpha * i_f.value + beta * i_g.value)) <= bound

    def test_non_integrable_exponent_rejected(self):
        """Exponents at or beyond the integrability limit are domain errors."""
        with pytest.raises(DomainError):
            PhiSingularity.power(1.0)
        with pytest.raises(DomainError):
            PhiSingularity(exponent_at_0=-1.0)

    def test_undeclared_singularity_exhausts_budget(self):
        """A strong endpoint power treated as regular does not converge in 4 panels."""
        with pytest.raises(NoConvergenceError) as exc_info:
            integrate_phi_singular(
                lambda phi: math.tan(0.5 * phi) ** -1.8 * math.sin(phi),
                REGULAR,
                max_panels=4,
            )
        assert exc_info.value.exit_code == 3
        assert math.isfinite(exc_info.value.partial_value)


class TestRadialRule:
    """Tests for the truncated radial integrator."""

    def test_gamma_integral(self):
        """Integral of r^2 e^{-r} over (0, inf) is 2."""
        result = integrate_radial(lambda r: r * r * math.exp(-r), 1.0, tol=1e-10)
        assert result.value == pytest.approx(2.0, abs=1e-9)

    def test_rejects_non_positive_rate(self):
        """The envelope needs a positive decay rate."""
        with pytest.raises(DomainError):
            integrate_radial(lambda r: 0.0, 0.0)


class TestProductRules:
    """Tests for sphere and R^3 integrals."""

    def test_sphere_area(self):
        """The constant 1 integrates to 4 pi."""
        result = sphere_integral(lambda p: 1.0)
        assert result.value == pytest.approx(4 * math.pi, rel=1e-10)

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("k,m", [(1, 2), (1, 3), (2, 3), (3, 4)])
    def test_family_members_have_unit_norm(self, n, k, m):
        """||g_{k/m}||^2 = 1 for the normalized members at every decay rate."""
        solution = g_km(RadialParams(n=n), FamilyIndex(k=k, m=m))
        result = r3_norm_sq(solution, solution.singularity, solution.decay_rate)
        assert result.value == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [0.5, 1.0, 2.0])
    def test_zero_limit_has_unit_norm(self, n):
        """The k = 0 member is normalized by sqrt(n^3/pi)."""
        solution = g_km(RadialParams(n=n), FamilyIndex.zero_limit())
        result = r3_norm_sq(solution, solution.singularity, solution.decay_rate)
        assert result.value == pytest.approx(1.0, abs=1e-6)
