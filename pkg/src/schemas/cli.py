"""Validated command-line configuration."""

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.enums import CheckFamily, OutputFormat
from src.core.exceptions import UsageError
from src.schemas.verify import DEFAULT_SEED, GridSpec

Subcommand = Literal["eval", "verify", "norm", "residual", "table"]

MAX_M = 64


class CliConfig(BaseModel):
    """Everything a subcommand needs, after flag parsing and unit conversion.

    Angles are stored in radians; ``--degrees`` is applied before this model
    is built.
    """

    model_config = ConfigDict(frozen=True)

    subcommand: Subcommand
    expressions: list[str] = Field(default_factory=list)

    # Points and sweeps
    theta: Optional[float] = None
    phi: Optional[float] = None
    k_values: list[int] = Field(default_factory=list)
    m_values: list[int] = Field(default_factory=list)
    n_values: list[float] = Field(default_factory=list)
    radii: list[float] = Field(default_factory=list)
    m_max: int = 12

    # Verification
    families: list[CheckFamily] = Field(default_factory=lambda: list(CheckFamily))
    grid: GridSpec = Field(default_factory=GridSpec)
    tolerance: Optional[float] = None
    negative_controls: bool = True
    fd_step: float = 1e-3
    fd_order: Literal[2, 4] = 2

    # Output
    output_format: OutputFormat = OutputFormat.TEXT
    output_path: Optional[str] = None
    show_d: bool = False
    seed: int = DEFAULT_SEED

    @model_validator(mode="after")
    def check_ranges(self) -> "CliConfig":
        for name in ("theta", "phi"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise UsageError(f"--{name} must be finite", field=name)
        if self.subcommand == "eval":
            if len(self.expressions) != 1:
                raise UsageError("eval takes exactly one expression", field="expressions")
            if self.theta is None or self.phi is None:
                raise UsageError("eval requires --theta and --phi", field="theta")
        if not 2 <= self.m_max <= MAX_M:
            raise UsageError(f"--m-max must lie in [2, {MAX_M}]", field="m_max")
        if any(not (math.isfinite(n) and n > 0.0) for n in self.n_values):
            raise UsageError("--n values must be finite and > 0", field="n_values")
        if any(not (math.isfinite(r) and r > 0.0) for r in self.radii):
            raise UsageError("--radii must be finite and > 0", field="radii")
        if self.tolerance is not None and not self.tolerance >= 0.0:
            raise UsageError("--tol must be >= 0", field="tolerance")
        if not (math.isfinite(self.fd_step) and self.fd_step > 0.0):
            raise UsageError("--h must be finite and > 0", field="fd_step")
        return self
