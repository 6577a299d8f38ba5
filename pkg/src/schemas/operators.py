"""Finite-difference stencil settings and fitted error models."""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class StencilSpec(BaseModel):
    """Central-difference stencil of order 2 or 4."""

    model_config = ConfigDict(frozen=True)

    order: Literal[2, 4] = 2
    h_theta: float = Field(..., gt=0.0)
    h_phi: float = Field(..., gt=0.0)
    h_r: Optional[float] = Field(default=None, gt=0.0)

    @classmethod
    def uniform(cls, h: float, order: Literal[2, 4] = 2) -> "StencilSpec":
        """Same step in every direction."""
        return cls(order=order, h_theta=h, h_phi=h, h_r=h)

    @property
    def reach(self) -> int:
        """Stencil half-width in units of the step."""
        return self.order // 2

    @property
    def radial_step(self) -> float:
        return self.h_r if self.h_r is not None else self.h_phi


class ErrorModel(BaseModel):
    """Least-squares fit error ~ constant * h^slope over a step sequence."""

    model_config = ConfigDict(frozen=True)

    slope: float
    constant: float
    steps: list[float]
    errors: list[float]

    def deficit(self, order: int) -> float:
        """How far the observed slope falls short of ``order``."""
        return max(0.0, order - self.slope)
