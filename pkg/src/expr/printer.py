"""
Canonical source text for expression trees.

Output is fully parenthesized, so it never depends on operator precedence.
Every tree the parser produces prints to text that parses back to the same
tree. Complex constants other than real numbers and +/-i print as
``(re+im*i)``, which reparses to an equal-valued Add node.
"""

import math

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


def _real(x: float) -> str:
    text = repr(float(x))
    if math.copysign(1.0, x) < 0.0:
        return f"(-{text.lstrip('-')})"
    return text


def _const(c: complex) -> str:
    if c.imag == 0.0:
        return _real(c.real)
    if c.real == 0.0 and c.imag == 1.0:
        return "i"
    if c.real == 0.0 and c.imag == -1.0:
        return "(-i)"
    return f"({_real(c.real)}+{_real(c.imag)}*i)"


def to_source(e: Expr) -> str:
    """Print ``e`` in the command-line expression language."""
    match e:
        case Const(value=c):
            return _const(c)
        case Zeta():
            return "zeta"
        case W():
            return "W"
        case Hkm(k=k, m=m):
            return f"h({k}/{m})"
        case Add(left=left, right=right):
            return f"({to_source(left)}+{to_source(right)})"
        case Mul(left=left, right=right):
            return f"({to_source(left)}*{to_source(right)})"
        case Inv(arg=arg):
            return f"inv({to_source(arg)})"
        case Exp(arg=arg):
            return f"exp({to_source(arg)})"
        case Log(arg=arg):
            return f"log({to_source(arg)})"
        case Conj(arg=arg):
            return f"conj({to_source(arg)})"
        case IntPow(arg=arg, power=power):
            return f"({to_source(arg)}^{power})"
    raise TypeError(f"unknown expression node {type(e).__name__}")
