"""Result and singularity descriptors shared by the integrators."""

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.exceptions import DomainError


class QuadratureResult(BaseModel):
    """Value of an integral with its error estimate and work count."""

    model_config = ConfigDict(frozen=True)

    value: float
    abs_error_estimate: float = Field(..., ge=0.0)
    evaluations: int = Field(..., ge=1)


class PhiSingularity(BaseModel):
    """Endpoint behaviour of a phi integrand relative to sin(phi).

    The integrand behaves like tan(phi/2)^(2 a0) sin(phi) near phi = 0 and
    like tan(phi/2)^(2 api) sin(phi) near phi = pi.
    """

    model_config = ConfigDict(frozen=True)

    exponent_at_0: float = 0.0
    exponent_at_pi: float = 0.0

    @model_validator(mode="after")
    def check_integrable(self) -> "PhiSingularity":
        if not self.exponent_at_0 > -1.0:
            raise DomainError(
                f"exponent_at_0={self.exponent_at_0} must exceed -1",
                details={"exponent_at_0": self.exponent_at_0},
            )
        if not self.exponent_at_pi < 1.0:
            raise DomainError(
                f"exponent_at_pi={self.exponent_at_pi} must be below 1",
                details={"exponent_at_pi": self.exponent_at_pi},
            )
        return self

    @classmethod
    def power(cls, a: float) -> "PhiSingularity":
        """Integrands like tan(phi/2)^(2a) sin(phi) at both ends."""
        return cls(exponent_at_0=a, exponent_at_pi=a)

    @property
    def beta_at_0(self) -> float:
        """Exponent of the integrand in t = tan(phi/2) near t = 0."""
        return 2.0 * self.exponent_at_0 + 1.0

    @property
    def beta_at_pi(self) -> float:
        """Exponent of the integrand in s = 1/t near s = 0."""
        return 1.0 - 2.0 * self.exponent_at_pi


REGULAR = PhiSingularity()
