"""
Immutable expression trees for closed-form angular functions.

Leaves are constants and the primitive angular functions
``zeta = theta + i ln tan(phi/2)``, ``W = tan(phi/2) e^{-i theta}`` and the
family member ``h_{k/m} = tan(phi/2)^{k/m} e^{-i k theta / m}``. Interior
nodes are the algebra operations plus the holomorphic outer functions exp,
log and integer powers. ``Conj`` is the only node that breaks holomorphy.

Rational powers exist only inside ``Hkm``, whose base tan(phi/2) is real and
positive on the cut domain, so no branch tracking is needed.
"""

from dataclasses import dataclass
from typing import Union

from src.core.exceptions import InvalidIndexError

Number = Union[int, float, complex]


class Expr:
    """Base class of every expression node."""

    __slots__ = ()

    @property
    def holomorphic(self) -> bool:
        raise NotImplementedError

    def children(self) -> tuple["Expr", ...]:
        return ()

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children()), default=0)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children())

    # Operator sugar; the parser builds the same trees.

    def __add__(self, other: "Expr | Number") -> "Expr":
        return Add(self, as_expr(other))

    def __radd__(self, other: Number) -> "Expr":
        return Add(as_expr(other), self)

    def __mul__(self, other: "Expr | Number") -> "Expr":
        return Mul(self, as_expr(other))

    def __rmul__(self, other: Number) -> "Expr":
        return Mul(as_expr(other), self)

    def __neg__(self) -> "Expr":
        return negate(self)

    def __sub__(self, other: "Expr | Number") -> "Expr":
        return Add(self, negate(as_expr(other)))

    def __rsub__(self, other: Number) -> "Expr":
        return Add(as_expr(other), negate(self))

    def __truediv__(self, other: "Expr | Number") -> "Expr":
        return Mul(self, Inv(as_expr(other)))

    def __rtruediv__(self, other: Number) -> "Expr":
        return Mul(as_expr(other), Inv(self))

    def __pow__(self, power: int) -> "Expr":
        return IntPow(self, power)


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", complex(self.value))

    @property
    def holomorphic(self) -> bool:
        return True


@dataclass(frozen=True, slots=True)
class Zeta(Expr):
    """theta + i ln tan(phi/2)."""

    @property
    def holomorphic(self) -> bool:
        return True


@dataclass(frozen=True, slots=True)
class W(Expr):
    """tan(phi/2) e^{-i theta}, equal to exp(-i zeta)."""

    @property
    def holomorphic(self) -> bool:
        return True


@dataclass(frozen=True, slots=True)
class Hkm(Expr):
    """tan(phi/2)^{k/m} e^{-i k theta / m} with 1 <= |k| <= m - 1."""

    k: int
    m: int

    def __post_init__(self) -> None:
        if self.m < 2 or not 1 <= abs(self.k) <= self.m - 1:
            raise InvalidIndexError(
                f"h({self.k}/{self.m}) requires m >= 2 and 1 <= |k| <= m - 1",
                k=self.k,
                m=self.m,
            )

    @property
    def holomorphic(self) -> bool:
        return True

    @property
    def alpha(self) -> float:
        return self.k / self.m


@dataclass(frozen=True, slots=True)
class Add(Expr):
    left: Expr
    right: Expr

    @property
    def holomorphic(self) -> bool:
        return self.left.holomorphic and self.right.holomorphic

    def children(self) -> tuple[Expr, ...]:
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    left: Expr
    right: Expr

    @property
    def holomorphic(self) -> bool:
        return self.left.holomorphic and self.right.holomorphic

    def children(self) -> tuple[Expr, ...]:
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Inv(Expr):
    arg: Expr

    @property
    def holomorphic(self) -> bool:
        return self.arg.holomorphic

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class Exp(Expr):
    arg: Expr

    @property
    def holomorphic(self) -> bool:
        return self.arg.holomorphic

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class Log(Expr):
    """Principal logarithm, argument in (-pi, pi]."""

    arg: Expr

    @property
    def holomorphic(self) -> bool:
        return self.arg.holomorphic

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class IntPow(Expr):
    arg: Expr
    power: int

    @property
    def holomorphic(self) -> bool:
        return self.arg.holomorphic

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class Conj(Expr):
    arg: Expr

    @property
    def holomorphic(self) -> bool:
        return False

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


# =============================================================================
# Constructors
# =============================================================================

ONE = Const(1.0)
IMAG_UNIT = Const(1j)
ZETA = Zeta()
W_MAP = W()


def as_expr(value: "Expr | Number") -> Expr:
    """Lift a Python number to a constant node."""
    if isinstance(value, Expr):
        return value
    return Const(value)


def const(value: Number) -> Const:
    return Const(value)


def hkm(k: int, m: int) -> Expr:
    """Family member h_{k/m}; h_{0/m} is identically 1 and becomes Const(1)."""
    if k == 0:
        if m < 2:
            raise InvalidIndexError("h(0/m) requires m >= 2", k=k, m=m)
        return ONE
    return Hkm(k, m)


def negate(e: Expr) -> Expr:
    """-e, folding the sign into constants."""
    if isinstance(e, Const):
        return Const(-e.value)
    return Mul(Const(-1.0), e)


def conj(e: Expr) -> Expr:
    return Conj(e)


def real_part(e: Expr) -> Expr:
    """(e + conj(e)) / 2, i.e. u when e = u + iv."""
    return Mul(Const(0.5), Add(e, Conj(e)))


def imag_part(e: Expr) -> Expr:
    """(e - conj(e)) / (2i), i.e. v when e = u + iv."""
    return Mul(Const(-0.5j), Add(e, negate(Conj(e))))


def abs_squared(e: Expr) -> Expr:
    """e * conj(e), real valued."""
    return Mul(e, Conj(e))
