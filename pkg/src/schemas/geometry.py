"""
Coordinates on the cut sphere and in R^3.

The cut removes the half-plane theta = 0 (equivalently 2*pi) and the poles,
so every valid point has 0 < theta < 2*pi and 0 < phi < pi.
"""

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.exceptions import DomainError

TWO_PI = 2.0 * math.pi


class AngularPoint(BaseModel):
    """Point on the unit sphere, strictly inside the cut domain."""

    model_config = ConfigDict(frozen=True)

    theta: float = Field(..., description="Azimuth in radians, 0 < theta < 2*pi")
    phi: float = Field(..., description="Polar angle in radians, 0 < phi < pi")

    @model_validator(mode="after")
    def check_domain(self) -> "AngularPoint":
        """Reject points on the cut, at the poles or non-finite."""
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise DomainError(
                "Angular coordinates must be finite",
                details={"theta": self.theta, "phi": self.phi},
            )
        if not 0.0 < self.theta < TWO_PI:
            raise DomainError(
                f"theta={self.theta!r} outside (0, 2*pi); theta=0 is the branch cut",
                details={"theta": self.theta},
            )
        if not 0.0 < self.phi < math.pi:
            raise DomainError(
                f"phi={self.phi!r} outside (0, pi); poles are excluded",
                details={"phi": self.phi},
            )
        return self

    @property
    def boundary_distance_theta(self) -> float:
        """Distance to the branch cut along theta."""
        return min(self.theta, TWO_PI - self.theta)

    @property
    def boundary_distance_phi(self) -> float:
        """Distance to the nearest pole along phi."""
        return min(self.phi, math.pi - self.phi)

    def shifted(self, d_theta: float = 0.0, d_phi: float = 0.0) -> "AngularPoint":
        """Return the point moved by (d_theta, d_phi), validated again."""
        return AngularPoint(theta=self.theta + d_theta, phi=self.phi + d_phi)


class Point3D(BaseModel):
    """Point of R^3 in spherical coordinates, off the cut half-plane."""

    model_config = ConfigDict(frozen=True)

    r: float = Field(..., description="Distance to the origin, r > 0")
    angular: AngularPoint

    @model_validator(mode="after")
    def check_radius(self) -> "Point3D":
        """Reject r <= 0 and non-finite radii."""
        if not (math.isfinite(self.r) and self.r > 0.0):
            raise DomainError(f"r={self.r!r} must be finite and > 0", details={"r": self.r})
        return self

    @classmethod
    def of(cls, r: float, theta: float, phi: float) -> "Point3D":
        """Build a point from its three spherical coordinates."""
        return cls(r=r, angular=AngularPoint(theta=theta, phi=phi))

    @property
    def theta(self) -> float:
        return self.angular.theta

    @property
    def phi(self) -> float:
        return self.angular.phi
