"""Application configuration with environment variables."""

from functools import lru_cache
from typing import Any

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical defaults loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    log_level: str = Field(default="WARNING", alias="LOG_LEVEL")
    log_json: bool = Field(default=False, alias="LOG_JSON")

    # Reproducibility
    seed: int = Field(default=0x5EED, alias="SPHERE_CR_SEED")

    # Verification grid
    grid_n_theta: int = Field(default=13, ge=2, alias="SPHERE_CR_GRID_N_THETA")
    grid_n_phi: int = Field(default=9, ge=2, alias="SPHERE_CR_GRID_N_PHI")
    margin_theta: float = Field(default=0.1, gt=0.0, alias="SPHERE_CR_MARGIN_THETA")
    margin_phi: float = Field(default=0.1, gt=0.0, alias="SPHERE_CR_MARGIN_PHI")

    # Quadrature
    quad_tolerance: float = Field(default=1e-10, gt=0.0, alias="SPHERE_CR_QUAD_TOL")
    quad_max_panels: int = Field(default=400, ge=2, alias="SPHERE_CR_QUAD_MAX_PANELS")
    quad_theta_nodes: int = Field(default=16, ge=4, alias="SPHERE_CR_QUAD_THETA_NODES")

    # Finite differences
    fd_step: float = Field(default=1e-3, gt=0.0, alias="SPHERE_CR_FD_STEP")
    fd_order: int = Field(default=2, alias="SPHERE_CR_FD_ORDER")

    # Tolerances
    exact_tolerance: float = Field(default=1e-10, ge=0.0, alias="SPHERE_CR_EXACT_TOL")
    order_slack: float = Field(default=0.2, ge=0.0, alias="SPHERE_CR_ORDER_SLACK")

    @field_validator("seed", mode="before")
    @classmethod
    def parse_seed(cls, v: Any) -> Any:
        """Accept decimal or 0x-prefixed seeds from the environment."""
        if isinstance(v, str):
            return int(v.strip(), 0)
        return v

    @field_validator("fd_order")
    @classmethod
    def check_fd_order(cls, v: int) -> int:
        """Only second- and fourth-order central stencils exist."""
        if v not in (2, 4):
            raise ValueError("fd_order must be 2 or 4")
        return v


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
