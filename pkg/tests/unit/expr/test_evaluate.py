"""
Unit tests for values, exact jets and the symbolic D operator.
"""

import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from src.core.exceptions import SingularValueError
from src.expr.evaluate import (
    evaluate,
    evaluate_jet,
    log_branch_hits,
    symbolic_d,
    symbolic_dbar,
)
from src.expr.jet import Jet2
from src.expr.nodes import (
    W_MAP,
    ZETA,
    Conj,
    Const,
    Exp,
    Hkm,
    IntPow,
    Inv,
    Log,
    Mul,
    abs_squared,
)
from src.schemas.geometry import AngularPoint
from src.services.operators import fit_error_model
from src.services.verify.grid import random_holomorphic_expr

thetas = st.floats(min_value=0.1, max_value=2 * math.pi - 0.1)
phis = st.floats(min_value=0.1, max_value=math.pi - 0.1)


def _numeric_partials(expr, p: AngularPoint, h: float = 1e-5) -> tuple[complex, complex]:
    f = lambda t, q: evaluate(expr, AngularPoint(theta=t, phi=q))  # noqa: E731
    d_theta = (f(p.theta + h, p.phi) - f(p.theta - h, p.phi)) / (2 * h)
    d_phi = (f(p.theta, p.phi + h) - f(p.theta, p.phi - h)) / (2 * h)
    return d_theta, d_phi


class TestValues:
    """Tests for pointwise values of the primitives."""

    def test_primitives_at_equator(self, equator_point):
        """tan(pi/4) = 1, so W = e^{-i pi} and zeta = pi."""
        assert evaluate(W_MAP, equator_point) == pytest.approx(-1.0)
        assert evaluate(ZETA, equator_point) == pytest.approx(math.pi)
        assert evaluate(Hkm(1, 2), equator_point) == pytest.approx(-1j)

    def test_w_is_exp_of_minus_i_zeta(self, point):
        """W = exp(-i zeta) everywhere on the domain."""
        via_zeta = evaluate(Exp(Mul(Const(-1j), ZETA)), point)
        assert via_zeta == pytest.approx(evaluate(W_MAP, point), rel=1e-14)

    def test_hkm_matches_closed_form(self, point):
        """h_{k/m} = tan(phi/2)^{k/m} e^{-i k theta/m}."""
        t = math.tan(0.5 * point.phi)
        expected = t ** (2 / 3) * cmath.exp(-2j * point.theta / 3)
        assert evaluate(Hkm(2, 3), point) == pytest.approx(expected, rel=1e-14)

    def test_negative_power_is_reciprocal(self, point):
        """W^-2 = 1 / (W W)."""
        assert evaluate(IntPow(W_MAP, -2), point) == pytest.approx(
            evaluate(Inv(Mul(W_MAP, W_MAP)), point), rel=1e-14
        )

    @pytest.mark.parametrize("expr", [Inv(Const(0.0)), Log(Const(0.0)), IntPow(Const(0.0), -1)])
    def test_singular_values_raise(self, expr, point):
        """Inv, Log and negative powers of zero are singular."""
        with pytest.raises(SingularValueError) as exc_info:
            evaluate(expr, point)
        assert exc_info.value.exit_code == 3

    def test_exp_overflow_is_singular(self, point):
        """Overflow surfaces as SingularValueError, not OverflowError."""
        with pytest.raises(SingularValueError):
            evaluate(Exp(Const(1e4)), point)

    def test_log_branch_hit_on_negative_axis(self, equator_point, point):
        """log(W) at theta = pi has its argument on the cut of the principal log."""
        assert log_branch_hits(Log(W_MAP), equator_point) == 1
        assert log_branch_hits(Log(W_MAP), point) == 0


class TestJets:
    """Tests for exact first and second partials."""

    @pytest.mark.parametrize(
        "expr",
        [ZETA, W_MAP, Hkm(3, 4), Exp(Mul(Const(0.5), ZETA)), Log(W_MAP), IntPow(Hkm(1, 3), 3)],
    )
    def test_first_partials_match_central_differences(self, expr, point):
        """Jet partials agree with O(h^2) central differences."""
        jet = evaluate_jet(expr, point)
        d_theta, d_phi = _numeric_partials(expr, point)
        assert jet.d_theta == pytest.approx(d_theta, rel=1e-8, abs=1e-8)
        assert jet.d_phi == pytest.approx(d_phi, rel=1e-8, abs=1e-8)

    def test_second_partials_of_w(self, point):
        """W_thth = -W and W_thph = -i W / sin(phi)."""
        jet = evaluate_jet(W_MAP, point)
        w = jet.value
        assert jet.d_theta_theta == pytest.approx(-w)
        assert jet.d_theta_phi == pytest.approx(-1j * w / math.sin(point.phi))

    def test_int_pow_zero_is_constant(self, point):
        """f^0 is the constant 1 with vanishing partials."""
        assert evaluate_jet(IntPow(ZETA, 0), point) == Jet2.constant(1.0)

    def test_conjugate_commutes_with_partials(self, point):
        """Partials of conj(f) are the conjugated partials of f."""
        jet = evaluate_jet(Hkm(1, 2), point)
        conj_jet = evaluate_jet(Conj(Hkm(1, 2)), point)
        assert conj_jet.partials() == tuple(z.conjugate() for z in jet.partials())

    def test_product_rule_second_order(self, point):
        """(fg)_thth = f_thth g + 2 f_th g_th + f g_thth."""
        f, g = evaluate_jet(W_MAP, point), evaluate_jet(ZETA, point)
        fg = evaluate_jet(Mul(W_MAP, ZETA), point)
        expected = f.d_theta_theta * g.value + 2 * f.d_theta * g.d_theta + f.value * g.d_theta_theta
        assert fg.d_theta_theta == pytest.approx(expected)


class TestSymbolicD:
    """Tests for D and its conjugate factor."""

    @given(theta=thetas, phi=phis)
    @settings(max_examples=50, deadline=None)
    def test_primitives_are_annihilated(self, theta, phi):
        """D zeta = D W = D h_{k/m} = 0 up to rounding."""
        p = AngularPoint(theta=theta, phi=phi)
        for expr in (ZETA, W_MAP, Hkm(1, 2), Hkm(-3, 5)):
            scale = 1.0 + abs(evaluate(expr, p))
            assert abs(symbolic_d(expr, p)) <= 1e-12 * scale

    def test_d_of_conj_w(self, point):
        """D conj(W) = 2i conj(W)."""
        conj_w = evaluate(Conj(W_MAP), point)
        assert symbolic_d(Conj(W_MAP), point) == pytest.approx(2j * conj_w)

    def test_dbar_of_w(self, point):
        """Dbar W = -2i W."""
        w = evaluate(W_MAP, point)
        assert symbolic_dbar(W_MAP, point) == pytest.approx(-2j * w)

    def test_abs_squared_is_not_annihilated(self, point):
        """|W|^2 is real and non-constant, so D does not kill it."""
        assert abs(symbolic_d(abs_squared(W_MAP), point)) > 1e-3


# =============================================================================
# Jet consistency
# =============================================================================

FD_STEPS = (1e-2, 5e-3, 2.5e-3)
JET_COMPONENTS = ("d_theta", "d_phi", "d_theta_theta", "d_theta_phi", "d_phi_phi")


def _fd_partials(expr, p: AngularPoint, h: float) -> dict[str, complex]:
    f = lambda t, q: evaluate(expr, AngularPoint(theta=t, phi=q))  # noqa: E731
    t, q = p.theta, p.phi
    center = f(t, q)
    return {
        "d_theta": (f(t + h, q) - f(t - h, q)) / (2 * h),
        "d_phi": (f(t, q + h) - f(t, q - h)) / (2 * h),
        "d_theta_theta": (f(t + h, q) - 2 * center + f(t - h, q)) / h**2,
        "d_phi_phi": (f(t, q + h) - 2 * center + f(t, q - h)) / h**2,
        "d_theta_phi": (
            f(t + h, q + h) - f(t + h, q - h) - f(t - h, q + h) + f(t - h, q - h)
        ) / (4 * h**2),
    }


class TestJetConsistency:
    """Exact jets against central differences of the values."""

    @pytest.mark.parametrize(
        "expr",
        [W_MAP, Hkm(2, 3), Exp(Mul(Const(0.5), ZETA)), Mul(W_MAP, ZETA), Conj(W_MAP)],
        ids=["W", "h23", "exp_half_zeta", "W_zeta", "conj_W"],
    )
    @pytest.mark.parametrize("component", JET_COMPONENTS)
    def test_differences_converge_to_jet(self, expr, component):
        """Every partial is matched at second order as h halves."""
        p = AngularPoint(theta=0.7, phi=1.1)
        exact = getattr(evaluate_jet(expr, p), component)
        errors = [abs(_fd_partials(expr, p, h)[component] - exact) for h in FD_STEPS]
        assert fit_error_model(FD_STEPS, errors).slope >= 1.9


# =============================================================================
# Algebraic identities on random trees
# =============================================================================

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _random_tree(seed: int):
    return random_holomorphic_expr(np.random.default_rng(seed), 4)


def _value_or_skip(expr, p: AngularPoint) -> complex:
    try:
        return evaluate(expr, p)
    except (SingularValueError, OverflowError):
        assume(False)
        raise


class TestAlgebraicIdentities:
    """Identities that hold for any holomorphic tree."""

    @given(seed=seeds, theta=thetas, phi=phis)
    @settings(max_examples=60, deadline=None)
    def test_product_with_inverse_is_one(self, seed, theta, phi):
        """e * inv(e) = 1 wherever |e| is away from 0."""
        e = _random_tree(seed)
        p = AngularPoint(theta=theta, phi=phi)
        magnitude = abs(_value_or_skip(e, p))
        assume(1e-8 < magnitude < 1e8)
        assert abs(_value_or_skip(Mul(e, Inv(e)), p) - 1.0) <= 1e-12

    @given(seed=seeds, theta=thetas, phi=phis)
    @settings(max_examples=60, deadline=None)
    def test_exp_of_log_is_identity(self, seed, theta, phi):
        """exp(log e) = e on the principal branch."""
        e = _random_tree(seed)
        p = AngularPoint(theta=theta, phi=phi)
        value = _value_or_skip(e, p)
        assume(1e-8 < abs(value) < 1e8)
        assert abs(_value_or_skip(Exp(Log(e)), p) - value) <= 1e-12 * (1.0 + abs(value))

    @given(seed=seeds, theta=thetas, phi=phis)
    @settings(max_examples=60, deadline=None)
    def test_conj_swaps_d_and_dbar(self, seed, theta, phi):
        """D conj(e) = conj(Dbar e), and conj(e) is never flagged holomorphic."""
        e = _random_tree(seed)
        assert e.holomorphic
        assert not Conj(e).holomorphic
        p = AngularPoint(theta=theta, phi=phi)
        try:
            d_conj = symbolic_d(Conj(e), p)
            dbar = symbolic_dbar(e, p)
        except (SingularValueError, OverflowError):
            assume(False)
            return
        assert abs(d_conj - dbar.conjugate()) <= 1e-12 * (1.0 + abs(dbar))
