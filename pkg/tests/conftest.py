"""Pytest configuration and fixtures."""

import math
from typing import Generator

import pytest

from src.core.config import get_settings
from src.core.enums import CheckFamily
from src.core.logging import configure_logging
from src.schemas.family import FamilyIndex, RadialParams
from src.schemas.geometry import AngularPoint
from src.schemas.verify import GridSpec, SuiteConfig


# =============================================================================
# Environment Setup
# =============================================================================


@pytest.fixture(scope="session", autouse=True)
def quiet_logging() -> None:
    """Route structlog through stdlib logging on stderr, warnings and above."""
    configure_logging(log_level="WARNING")


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch: pytest.MonkeyPatch) -> Generator[None, None, None]:
    """Settings come from defaults unless a test sets SPHERE_CR_* itself."""
    monkeypatch.delenv("SPHERE_CR_SEED", raising=False)
    monkeypatch.delenv("LOG_LEVEL", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


# =============================================================================
# Geometry Fixtures
# =============================================================================


@pytest.fixture
def point() -> AngularPoint:
    """A generic interior point, away from pi/2 and pi."""
    return AngularPoint(theta=1.3, phi=0.9)


@pytest.fixture
def equator_point() -> AngularPoint:
    """theta = pi, phi = pi/2, where W = -1 and zeta = pi."""
    return AngularPoint(theta=math.pi, phi=0.5 * math.pi)


@pytest.fixture
def small_grid() -> GridSpec:
    """A coarse grid that keeps exact-jet checks fast."""
    return GridSpec(n_theta=5, n_phi=4, margin_theta=0.2, margin_phi=0.2)


@pytest.fixture
def fd_grid() -> GridSpec:
    """Margins wide enough for nested order-4 stencils at h = 1e-2."""
    return GridSpec(n_theta=3, n_phi=3, margin_theta=0.3, margin_phi=0.3)


# =============================================================================
# Family Fixtures
# =============================================================================


@pytest.fixture
def half() -> FamilyIndex:
    return FamilyIndex(k=1, m=2)


@pytest.fixture
def unit_decay() -> RadialParams:
    return RadialParams(n=1.0)


@pytest.fixture
def fast_suite_config(small_grid: GridSpec) -> SuiteConfig:
    """Exact-jet families only, on the coarse grid."""
    return SuiteConfig(
        families=[
            CheckFamily.CR,
            CheckFamily.PRODUCT_CLOSURE,
            CheckFamily.INVERSE_CLOSURE,
            CheckFamily.HARMONICITY,
        ],
        grid=small_grid,
    )
