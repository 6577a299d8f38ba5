"""
Second-order forward-mode jets in the two angular variables.

A ``Jet2`` carries a complex value together with its exact partials
d/dtheta, d/dphi and the three second partials. Arithmetic follows the
product and chain rules, so evaluating an expression tree on jets yields
exact derivatives (up to rounding) without finite differences.
"""

from dataclasses import dataclass

_ZERO = 0j


@dataclass(frozen=True, slots=True)
class Jet2:
    value: complex
    d_theta: complex = _ZERO
    d_phi: complex = _ZERO
    d_theta_theta: complex = _ZERO
    d_theta_phi: complex = _ZERO
    d_phi_phi: complex = _ZERO

    @classmethod
    def constant(cls, value: complex) -> "Jet2":
        return cls(complex(value))

    def __add__(self, other: "Jet2") -> "Jet2":
        return Jet2(
            self.value + other.value,
            self.d_theta + other.d_theta,
            self.d_phi + other.d_phi,
            self.d_theta_theta + other.d_theta_theta,
            self.d_theta_phi + other.d_theta_phi,
            self.d_phi_phi + other.d_phi_phi,
        )

    def __mul__(self, other: "Jet2") -> "Jet2":
        f, g = self, other
        return Jet2(
            f.value * g.value,
            f.d_theta * g.value + f.value * g.d_theta,
            f.d_phi * g.value + f.value * g.d_phi,
            f.d_theta_theta * g.value
            + 2.0 * f.d_theta * g.d_theta
            + f.value * g.d_theta_theta,
            f.d_theta_phi * g.value
            + f.d_theta * g.d_phi
            + f.d_phi * g.d_theta
            + f.value * g.d_theta_phi,
            f.d_phi_phi * g.value + 2.0 * f.d_phi * g.d_phi + f.value * g.d_phi_phi,
        )

    def scale(self, c: complex) -> "Jet2":
        return Jet2(
            c * self.value,
            c * self.d_theta,
            c * self.d_phi,
            c * self.d_theta_theta,
            c * self.d_theta_phi,
            c * self.d_phi_phi,
        )

    def compose(self, f0: complex, f1: complex, f2: complex) -> "Jet2":
        """Jet of F(self) given F, F' and F'' at self.value."""
        return Jet2(
            f0,
            f1 * self.d_theta,
            f1 * self.d_phi,
            f2 * self.d_theta * self.d_theta + f1 * self.d_theta_theta,
            f2 * self.d_theta * self.d_phi + f1 * self.d_theta_phi,
            f2 * self.d_phi * self.d_phi + f1 * self.d_phi_phi,
        )

    def conjugate(self) -> "Jet2":
        # theta and phi are real, so conjugation commutes with every partial.
        return Jet2(
            self.value.conjugate(),
            self.d_theta.conjugate(),
            self.d_phi.conjugate(),
            self.d_theta_theta.conjugate(),
            self.d_theta_phi.conjugate(),
            self.d_phi_phi.conjugate(),
        )

    def partials(self) -> tuple[complex, ...]:
        return (
            self.d_theta,
            self.d_phi,
            self.d_theta_theta,
            self.d_theta_phi,
            self.d_phi_phi,
        )
