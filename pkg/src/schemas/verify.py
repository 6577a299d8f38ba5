"""
Verification grid, check report and suite report schemas.

``SuiteReport`` is the document written by ``sphere-cr verify``; its JSON
shape is published in docs/schemas/suite_report.schema.json.
"""

import math
from typing import Any, Literal, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, computed_field, model_validator

from src.core.enums import CheckFamily, CheckStatus
from src.core.exceptions import DomainError

REPORT_VERSION = "1.0"

DEFAULT_SEED = 0x5EED

DEFAULT_NORM_TOLERANCE = 1e-6


# --- Grid ---


class GridSpec(BaseModel):
    """Tensor grid on the cut sphere, bounded away from the cut and the poles."""

    model_config = ConfigDict(frozen=True)

    n_theta: int = Field(default=13, ge=1)
    n_phi: int = Field(default=9, ge=1)
    margin_theta: float = Field(default=0.1, gt=0.0)
    margin_phi: float = Field(default=0.1, gt=0.0)
    n_random: int = Field(default=0, ge=0, description="Extra seeded random points")
    seed: int = DEFAULT_SEED

    @model_validator(mode="after")
    def check_margins(self) -> "GridSpec":
        if not self.margin_theta < math.pi:
            raise DomainError("margin_theta must be < pi", details={"margin_theta": self.margin_theta})
        if not self.margin_phi < 0.5 * math.pi:
            raise DomainError("margin_phi must be < pi/2", details={"margin_phi": self.margin_phi})
        return self

    @property
    def size(self) -> int:
        return self.n_theta * self.n_phi + self.n_random

    def with_margins(self, margin_theta: float, margin_phi: float) -> "GridSpec":
        return self.model_copy(update={"margin_theta": margin_theta, "margin_phi": margin_phi})


# --- Reports ---


def format_details(values: Mapping[str, Any]) -> str:
    """Render a mapping as ``key=value`` pairs in key order."""
    parts = []
    for key in sorted(values):
        value = values[key]
        if isinstance(value, float):
            value = format(value, ".6g")
        parts.append(f"{key}={value}")
    return "; ".join(parts)


class CheckReport(BaseModel):
    """Outcome of one named check."""

    name: str
    status: CheckStatus
    metric: Optional[float] = Field(..., description="Max residual or |value - target|")
    tolerance: float
    points_tested: int = Field(default=0, ge=0)
    details: str = ""

    _measurements: dict[str, float] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def check_status(self) -> "CheckReport":
        """status=pass iff metric <= tolerance."""
        within = self.metric is not None and self.metric <= self.tolerance
        if self.status == CheckStatus.PASS and not within:
            raise ValueError("pass requires metric <= tolerance")
        if self.status == CheckStatus.FAIL and within:
            raise ValueError("fail requires metric > tolerance")
        return self

    @classmethod
    def from_metric(
        cls,
        name: str,
        metric: float,
        tolerance: float,
        points_tested: int,
        details: Optional[Mapping[str, Any]] = None,
        measurements: Optional[Mapping[str, float]] = None,
    ) -> "CheckReport":
        status = CheckStatus.PASS if metric <= tolerance else CheckStatus.FAIL
        report = cls(
            name=name,
            status=status,
            metric=metric,
            tolerance=tolerance,
            points_tested=points_tested,
            details=format_details(details or {}),
        )
        report._measurements = dict(measurements or {})
        return report

    @classmethod
    def not_applicable(cls, name: str, tolerance: float, reason: str) -> "CheckReport":
        return cls(
            name=name,
            status=CheckStatus.NOT_APPLICABLE,
            metric=None,
            tolerance=tolerance,
            points_tested=0,
            details=format_details({"not_applicable": reason}),
        )

    @classmethod
    def from_error(cls, name: str, tolerance: float, error: Exception) -> "CheckReport":
        return cls(
            name=name,
            status=CheckStatus.ERROR,
            metric=None,
            tolerance=tolerance,
            points_tested=0,
            details=format_details({"error": type(error).__name__, "message": str(error)}),
        )

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASS

    @property
    def measurements(self) -> dict[str, float]:
        """Raw values behind the metric; not serialized."""
        return self._measurements


# --- Suite ---


def _default_indices() -> list[tuple[int, int]]:
    return [(1, 2), (1, 3), (2, 3), (3, 4)]


class SuiteConfig(BaseModel):
    """Everything that determines a suite run, echoed into the report."""

    model_config = ConfigDict(frozen=True)

    families: list[CheckFamily] = Field(default_factory=lambda: list(CheckFamily))
    grid: GridSpec = Field(default_factory=GridSpec)
    seed: int = DEFAULT_SEED
    exact_tolerance: float = Field(default=1e-10, ge=0.0)
    quad_tolerance: float = Field(default=1e-8, ge=0.0)
    norm_tolerance: float = Field(default=DEFAULT_NORM_TOLERANCE, ge=0.0)
    order_slack: float = Field(default=0.2, ge=0.0)
    fd_order: Literal[2, 4] = 2
    fd_steps: list[float] = Field(default_factory=lambda: [1e-2, 5e-3, 2.5e-3])
    m_max: int = Field(default=12, ge=2)
    n_values: list[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0])
    indices: list[tuple[int, int]] = Field(default_factory=_default_indices)
    radii: list[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0])
    random_expressions: int = Field(default=200, ge=0)
    random_depth: int = Field(default=6, ge=1)
    negative_controls: bool = True

    @classmethod
    def empty(cls) -> "SuiteConfig":
        """A configuration that schedules no checks."""
        return cls(families=[])

    def with_tolerance(self, tolerance: float) -> "SuiteConfig":
        """Every tolerance replaced by ``tolerance``.

        Negative controls keep their own tolerance of 0 and report metric 0
        when the wrapped counterexample fails, so with ``tolerance=0`` they
        still pass. Finite-difference checks whose errors sit on the
        roundoff floor also report 0 and pass.
        """
        return self.model_copy(
            update={
                "exact_tolerance": tolerance,
                "quad_tolerance": tolerance,
                "norm_tolerance": tolerance,
                "order_slack": tolerance,
            }
        )


class SuiteReport(BaseModel):
    """All check reports of one run, sorted by check name."""

    version: str = REPORT_VERSION
    config: SuiteConfig
    checks: list[CheckReport]
    wall_time_ms: float

    @computed_field  # type: ignore[prop-decorator]
    @property
    def status(self) -> CheckStatus:
        """pass iff every member check passes; vacuously pass when empty."""
        if all(check.passed for check in self.checks):
            return CheckStatus.PASS
        return CheckStatus.FAIL

    @property
    def failed(self) -> list[CheckReport]:
        return [check for check in self.checks if not check.passed]
