"""
Pointwise evaluation of expression trees: values, exact jets and the
symbolic D operator.

D := d/dtheta + i sin(phi) d/dphi. An expression is angular holomorphic iff
D annihilates it; ``symbolic_d`` computes D from exact jets, never from
finite differences.
"""

import cmath
import math
from dataclasses import dataclass

from src.core.exceptions import SingularValueError
from src.expr.jet import Jet2
from src.expr.nodes import (
    Add,
    Conj,
    Const,
    Exp,
    Expr,
    Hkm,
    IntPow,
    Inv,
    Log,
    Mul,
    W,
    Zeta,
)
from src.schemas.geometry import AngularPoint

# Relative size of the imaginary part below which a Log argument counts as
# lying on the negative real axis.
BRANCH_TOLERANCE = 1e-12


@dataclass(frozen=True, slots=True)
class _PointContext:
    theta: float
    sin_phi: float
    cos_phi: float
    tan_half: float
    log_tan_half: float

    @classmethod
    def at(cls, p: AngularPoint) -> "_PointContext":
        t = math.tan(0.5 * p.phi)
        return cls(
            theta=p.theta,
            sin_phi=math.sin(p.phi),
            cos_phi=math.cos(p.phi),
            tan_half=t,
            log_tan_half=math.log(t),
        )


def evaluate(e: Expr, p: AngularPoint) -> complex:
    """Value u + iv of ``e`` at ``p``.

    Raises:
        SingularValueError: Inv/Log of zero, or a non-finite result
    """
    value = _value(e, _PointContext.at(p))
    if not cmath.isfinite(value):
        raise SingularValueError(f"non-finite value {value!r}", node=type(e).__name__)
    return value


def evaluate_jet(e: Expr, p: AngularPoint) -> Jet2:
    """Value and exact first and second partials of ``e`` at ``p``."""
    jet = _jet(e, _PointContext.at(p))
    if not all(cmath.isfinite(z) for z in (jet.value, *jet.partials())):
        raise SingularValueError("non-finite jet entry", node=type(e).__name__)
    return jet


def symbolic_d(e: Expr, p: AngularPoint) -> complex:
    """D e at p, exact: d_theta + i sin(phi) d_phi."""
    jet = evaluate_jet(e, p)
    return jet.d_theta + 1j * math.sin(p.phi) * jet.d_phi


def symbolic_dbar(e: Expr, p: AngularPoint) -> complex:
    """Conjugate factor d_theta - i sin(phi) d_phi applied to e at p."""
    jet = evaluate_jet(e, p)
    return jet.d_theta - 1j * math.sin(p.phi) * jet.d_phi


def log_branch_hits(e: Expr, p: AngularPoint) -> int:
    """Number of Log nodes whose argument sits on the negative real axis at p."""
    ctx = _PointContext.at(p)
    hits = 0
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Log):
            z = _value(node.arg, ctx)
            if z.real < 0.0 and abs(z.imag) <= BRANCH_TOLERANCE * abs(z):
                hits += 1
        stack.extend(node.children())
    return hits


# =============================================================================
# Value recursion
# =============================================================================


def _value(e: Expr, ctx: _PointContext) -> complex:
    match e:
        case Const(value=c):
            return c
        case Zeta():
            return complex(ctx.theta, ctx.log_tan_half)
        case W():
            return ctx.tan_half * complex(math.cos(ctx.theta), -math.sin(ctx.theta))
        case Hkm():
            alpha = e.alpha
            magnitude = ctx.tan_half**alpha
            angle = alpha * ctx.theta
            return complex(magnitude * math.cos(angle), -magnitude * math.sin(angle))
        case Add(left=a, right=b):
            return _value(a, ctx) + _value(b, ctx)
        case Mul(left=a, right=b):
            return _value(a, ctx) * _value(b, ctx)
        case Inv(arg=a):
            z = _value(a, ctx)
            if z == 0:
                raise SingularValueError("inverse of zero", node="Inv")
            return 1.0 / z
        case Exp(arg=a):
            return _exp(_value(a, ctx))
        case Log(arg=a):
            z = _value(a, ctx)
            if z == 0:
                raise SingularValueError("logarithm of zero", node="Log")
            return cmath.log(z)
        case IntPow(arg=a, power=n):
            return _power(_value(a, ctx), n)
        case Conj(arg=a):
            return _value(a, ctx).conjugate()
    raise TypeError(f"unknown expression node {type(e).__name__}")


def _exp(z: complex) -> complex:
    try:
        return cmath.exp(z)
    except OverflowError as exc:
        raise SingularValueError(f"exp overflow at {z!r}", node="Exp") from exc


def _power(z: complex, n: int) -> complex:
    if n < 0 and z == 0:
        raise SingularValueError("negative power of zero", node="IntPow")
    if n == 0:
        return 1 + 0j
    try:
        return z**n
    except OverflowError as exc:
        raise SingularValueError(f"power overflow at {z!r}", node="IntPow") from exc


# =============================================================================
# Jet recursion
# =============================================================================


def _jet(e: Expr, ctx: _PointContext) -> Jet2:
    s, c = ctx.sin_phi, ctx.cos_phi
    match e:
        case Const(value=value):
            return Jet2.constant(value)
        case Zeta():
            return Jet2(
                complex(ctx.theta, ctx.log_tan_half),
                1 + 0j,
                1j / s,
                0j,
                0j,
                -1j * c / (s * s),
            )
        case W():
            w = _value(e, ctx)
            return Jet2(w, -1j * w, w / s, -w, -1j * w / s, w * (1.0 - c) / (s * s))
        case Hkm():
            h = _value(e, ctx)
            a = e.alpha
            return Jet2(
                h,
                -1j * a * h,
                a * h / s,
                -a * a * h,
                -1j * a * a * h / s,
                a * h * (a - c) / (s * s),
            )
        case Add(left=a, right=b):
            return _jet(a, ctx) + _jet(b, ctx)
        case Mul(left=a, right=b):
            return _jet(a, ctx) * _jet(b, ctx)
        case Inv(arg=a):
            inner = _jet(a, ctx)
            z = inner.value
            if z == 0:
                raise SingularValueError("inverse of zero", node="Inv")
            r = 1.0 / z
            return inner.compose(r, -r * r, 2.0 * r * r * r)
        case Exp(arg=a):
            inner = _jet(a, ctx)
            ez = _exp(inner.value)
            return inner.compose(ez, ez, ez)
        case Log(arg=a):
            inner = _jet(a, ctx)
            z = inner.value
            if z == 0:
                raise SingularValueError("logarithm of zero", node="Log")
            r = 1.0 / z
            return inner.compose(cmath.log(z), r, -r * r)
        case IntPow(arg=a, power=n):
            inner = _jet(a, ctx)
            if n == 0:
                return Jet2.constant(1.0)
            z = inner.value
            f0 = _power(z, n)
            f1 = n * _power(z, n - 1)
            f2 = n * (n - 1) * _power(z, n - 2) if n != 1 else 0j
            return inner.compose(f0, f1, f2)
        case Conj(arg=a):
            return _jet(a, ctx).conjugate()
    raise TypeError(f"unknown expression node {type(e).__name__}")
