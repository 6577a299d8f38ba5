"""Index and parameter types of the h_{k/m} and g_{k/m} families."""

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.exceptions import DomainError, InvalidIndexError


class FamilyIndex(BaseModel):
    """The pair (k, m) with 1 <= |k| <= m - 1.

    k = 0 is admitted only through ``zero_limit``, which marks the member as
    the continuous limit of the closed forms.
    """

    model_config = ConfigDict(frozen=True)

    k: int
    m: int
    is_limit: bool = Field(default=False, description="k = 0 continuity-limit member")

    @model_validator(mode="after")
    def check_index(self) -> "FamilyIndex":
        if self.m < 2:
            raise InvalidIndexError(f"m={self.m} must be >= 2", k=self.k, m=self.m)
        if self.is_limit:
            if self.k != 0:
                raise InvalidIndexError("limit members require k = 0", k=self.k, m=self.m)
            return self
        if not 1 <= abs(self.k) <= self.m - 1:
            raise InvalidIndexError(
                f"({self.k}, {self.m}) violates 1 <= |k| <= m - 1",
                k=self.k,
                m=self.m,
            )
        return self

    @classmethod
    def zero_limit(cls, m: int = 2) -> "FamilyIndex":
        """The k = 0 member, h identically 1."""
        return cls(k=0, m=m, is_limit=True)

    @classmethod
    def parse(cls, k: int, m: int) -> "FamilyIndex":
        """Build an index, routing k = 0 to the limit constructor."""
        if k == 0:
            return cls.zero_limit(m)
        return cls(k=k, m=m)

    @property
    def alpha(self) -> float:
        return self.k / self.m

    @property
    def label(self) -> str:
        return f"{self.k}/{self.m}"


class RadialParams(BaseModel):
    """Inverse-length scale n of the radial factor e^{-n r}."""

    model_config = ConfigDict(frozen=True)

    n: float = Field(..., description="Decay rate, n > 0")

    @model_validator(mode="after")
    def check_positive(self) -> "RadialParams":
        if not (math.isfinite(self.n) and self.n > 0.0):
            raise DomainError(f"n={self.n!r} must be finite and > 0", details={"n": self.n})
        return self
