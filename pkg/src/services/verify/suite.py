"""
Suite runner: schedules every check family over its configured sweeps.

Each scheduled check is a named thunk. Thunks run one after another; a
check that raises becomes an ``error`` report instead of aborting the run,
and a holomorphy gate that refuses its input becomes ``not_applicable``.
Reports are sorted by name, so two runs with the same configuration
serialize identically apart from ``wall_time_ms``.
"""

import math
import time
from dataclasses import dataclass
from functools import partial
from typing import Callable, Iterator, Optional

from src.core.enums import CheckFamily, CheckStatus, Composition
from src.core.exceptions import NotApplicableError, SphereCRError
from src.core.logging import CheckLogger
from src.expr.nodes import (
    IMAG_UNIT,
    W_MAP,
    ZETA,
    Conj,
    Const,
    Exp,
    Expr,
    Inv,
    Mul,
    abs_squared,
    hkm,
    real_part,
)
from src.expr.printer import to_source
from src.schemas.family import FamilyIndex, RadialParams
from src.schemas.geometry import AngularPoint
from src.schemas.verify import CheckReport, SuiteConfig, SuiteReport
from src.services.family import potential_nu
from src.services.verify import checks
from src.services.verify.grid import MAX_FAMILY_M

NEGATIVE_SUFFIX = "negative_control"


@dataclass(frozen=True, slots=True)
class ScheduledCheck:
    name: str
    tolerance: float
    run: Callable[[], CheckReport]
    negative: bool = False


# =============================================================================
# Panels
# =============================================================================


def holomorphic_panel() -> list[Expr]:
    """zeta, W, every h_{k/m} with k > 0 and m <= 8, h(-1/2), and a few
    products and compositions of those."""
    panel: list[Expr] = [ZETA, W_MAP]
    panel.extend(hkm(k, m) for m in range(2, MAX_FAMILY_M + 1) for k in range(1, m))
    panel.append(hkm(-1, 2))
    panel.append(Mul(W_MAP, W_MAP))
    panel.append(Exp(Mul(Const(-1j), ZETA)))
    panel.append(Inv(W_MAP))
    panel.append(Mul(hkm(1, 2), hkm(2, 3)))
    return panel


OSCILLATION_FREQUENCY = 1500.0


def fast_oscillation(p: AngularPoint) -> complex:
    """cos(1500 theta).

    1500 h / 2 is 7.5, 3.75 and 1.875 rad on the default steps, away from
    multiples of pi, so no stencil aliases it to a resolved frequency.
    """
    return complex(math.cos(OSCILLATION_FREQUENCY * p.theta))


def _members(config: SuiteConfig) -> list[FamilyIndex]:
    return [FamilyIndex(k=k, m=m) for k, m in config.indices]


# =============================================================================
# Schedules
# =============================================================================


def _cr(config: SuiteConfig) -> Iterator[ScheduledCheck]:
    tol = config.exact_tolerance
    for f in holomorphic_panel():
        name = f"cr:{to_source(f)}"
        yield ScheduledCheck(name, tol, partial(checks.check_cr, f, config.grid, tol, name=name))
    bad = Conj(W_MAP)
    name = f"cr:{to_source(bad)}"
    yield ScheduledCheck(name, tol, partial(checks.check_cr, bad, config.grid, tol, name=name), True)


def _product_closure(config: SuiteConfig) -> Iterator[ScheduledCheck]:
    tol = config.exact_tolerance
    pairs = [
        (W_MAP, W_MAP, False),
        (hkm(1, 2), Exp(W_MAP), False),
        (ZETA, hkm(2, 3), False),
        (W_MAP, Conj(W_MAP), True),
    ]
    for f, g, negative in pairs:
        name = f"product_closure:{to_source(f)}*{to_source(g)}"
        run = partial(checks.check_product_closure, f, g, config.grid, tol, name=name)
        yield ScheduledCheck(name, tol, run, negative)


def _inverse_closure(config: SuiteConfig) -> Iterator[ScheduledCheck]:
    tol = config.exact_tolerance
    for f in (W_MAP, ZETA, hkm(1, 3)):
        name = f"inverse_closure:{to_source(f)}"
        yield ScheduledCheck(
            name, tol, partial(checks.check_inverse_closure, f, config.grid, tol, name=name)
        )
    bad = Conj(W_MAP)
    name = f"inverse_closure:{to_source(bad)}"
    run = partial(
        checks.check_inverse_closure, bad, config.grid, tol, require_holomorphic=False, name=name
    )
    yield ScheduledCheck(name, tol, run, True)


def _composition(config: SuiteConfig) -> Iterator[ScheduledCheck]:
    tol = config.exact_tolerance
    cases: list[tuple[Composition, Expr, int, Optional[Expr], bool]] = [
        (Composition.EXP, Mul(Const(-1j), ZETA), 2, W_MAP, False),
        (Composition.INTPOW, W_MAP, 3, None, False),
        (Composition.LOG, hkm(1, 2), 2, None, False),
        (Composition.EXP, hkm(1, 3), 2, None, False),
        (Composition.EXP, Conj(W_MAP), 2, None, True),
    ]
    for outer, f, power, reference, negative in cases:
        name = f"composition:{to_source(checks.compose(outer, f, power))}"
        run = partial(
            checks.check_composition,
            outer,
            f,
            config.grid,
            tol,
            power=power,
            reference=reference,
            require_holomorphic=not negative,
            name=name,
        )
        yield ScheduledCheck(name, tol, run, negative)


def _harmonicity(config: SuiteConfig) -> Iterator[ScheduledCheck]:
    tol = config.exact_tolerance
    for f in holomorphic_panel():
        name = f"harmonicity:{to_source(f)}"
        yield ScheduledCheck(name, tol, partial(checks.check_harmonicity, f, config.grid, tol, name=name))
    bad = abs_squared(W_MAP)
    name = f"harmonicity:{to_source(bad)}"
    yield ScheduledCheck(
        name, tol, partial(checks.check_harmonicity, bad, config.grid, tol, name=name), True
    )


def _gradient_orthogonality(config: SuiteConfig) -> Iterator[ScheduledCheck]:
    tol = config.exact_tolerance
    for f in holomorphic_panel():
        name = f"gradient_orthogonality:{to_source(f)}"
        yield ScheduledCheck(
            name, tol, partial(checks.check_gradient_orthogonality, f, config.grid, tol, name=name)
        )
    # Re W in both components, so the two gradients coincide.
    bad = Mul(Const(1 + 1j), real_part(W_MAP))
    name = f"gradient_orthogonality:{to_source(bad)}"
    yield ScheduledCheck(
        name, tol, partial(checks.check_gradient_orthogonality, bad, config.grid, tol, name=name), True
    )


def _factorization(config: SuiteConfig) -> Iterator[ScheduledCheck]:
    slack = config.order_slack
    model = dict(steps=config.fd_steps, order=config.fd_order, slack=slack)
    for f in (abs_squared(W_MAP), real_part(hkm(1, 2)), Const(2.0), Conj(W_MAP)):
        name = f"factorization:{to_source(f)}"
        yield ScheduledCheck(
            name, slack, partial(checks.check_factorization, f, config.grid, name=name, **model)
        )
    name = "factorization:cos(1500*theta)"
    yield ScheduledCheck(
        name,
        slack,
        partial(checks.check_factorization, fast_oscillation, config.grid, name=name, **model),
        True,
    )


def _phi_integral(config: SuiteConfig) -> Iterator[ScheduledCheck]:
    tol = config.quad_tolerance
    indices = [FamilyIndex(k=k, m=m) for m in range(2, config.m_max + 1) for k in range(1, m)]
    indices.append(FamilyIndex.zero_limit())
    indices.append(FamilyIndex(k=-1, m=2))
    for idx in indices:
        name = f"phi_integral:{idx.label}"
        yield ScheduledCheck(name, tol, partial(checks.check_phi_integral, idx, tol, name=name))
    idx = FamilyIndex(k=1, m=2)
    name = f"phi_integral:{idx.label}:shifted"
    run = partial(checks.check_phi_integral, idx, tol, exponent_shift=0.05, name=name)
    yield ScheduledCheck(name, tol, run, True)


def _unit_norm(config: SuiteConfig) -> Iterator[ScheduledCheck]:
    tol = config.norm_tolerance
    for n in config.n_values:
        rp = RadialParams(n=n)
        for idx in _members(config) + [FamilyIndex.zero_limit()]:
            name = f"unit_norm:n={n:g}:{idx.label}"
            yield ScheduledCheck(name, tol, partial(checks.check_unit_norm, rp, idx, tol, name=name))
    rp = RadialParams(n=1.0)
    idx = FamilyIndex(k=1, m=2)
    name = f"unit_norm:n=1:{idx.label}:unnormalized"
    run = partial(checks.check_unit_norm, rp, idx, tol, normalized=False, name=name)
    yield ScheduledCheck(name, tol, run, True)


def _schrodinger(config: SuiteConfig) -> Iterator[ScheduledCheck]:
    slack = config.order_slack
    model = dict(
        radii=config.radii, steps=config.fd_steps, order=config.fd_order, slack=slack
    )
    for n in config.n_values:
        rp = RadialParams(n=n)
        for idx in _members(config):
            name = f"schrodinger:n={n:g}:{idx.label}"
            yield ScheduledCheck(
                name, slack, partial(checks.check_schrodinger, rp, idx, config.grid, name=name, **model)
            )
        idx = FamilyIndex.zero_limit()
        name = f"schrodinger:n={n:g}:{idx.label}:exact_radial"
        run = partial(
            checks.check_schrodinger, rp, idx, config.grid, exact_radial=True, name=name, **model
        )
        yield ScheduledCheck(name, slack, run)

    idx = FamilyIndex(k=1, m=2)
    name = f"schrodinger:n=1:{idx.label}:mismatched_potential"
    run = partial(
        checks.check_schrodinger,
        RadialParams(n=1.0),
        idx,
        config.grid,
        potential=partial(potential_nu, RadialParams(n=2.0)),
        name=name,
        **model,
    )
    yield ScheduledCheck(name, slack, run, True)


def _associated_solution(config: SuiteConfig) -> Iterator[ScheduledCheck]:
    slack = config.order_slack
    model = dict(
        radii=config.radii, steps=config.fd_steps, order=config.fd_order, slack=slack
    )
    rp = RadialParams(n=config.n_values[0] if config.n_values else 1.0)
    panel = [
        (W_MAP, False),
        (ZETA, False),
        (Exp(Mul(IMAG_UNIT, hkm(1, 2))), False),
        (abs_squared(W_MAP), True),
    ]
    for h, negative in panel:
        name = f"associated_solution:n={rp.n:g}:{to_source(h)}"
        run = partial(checks.check_associated_solution, rp, h, config.grid, name=name, **model)
        yield ScheduledCheck(name, slack, run, negative)


def _random_holomorphy(config: SuiteConfig) -> Iterator[ScheduledCheck]:
    tol = config.exact_tolerance
    for conjugate in (False, True):
        name = "random_holomorphy:conjugated" if conjugate else "random_holomorphy"
        run = partial(
            checks.check_random_holomorphy,
            config.seed,
            n_exprs=config.random_expressions,
            depth=config.random_depth,
            tol=tol,
            conjugate=conjugate,
            name=name,
        )
        yield ScheduledCheck(name, tol, run, conjugate)


def _margin_monotonicity(config: SuiteConfig) -> Iterator[ScheduledCheck]:
    for factors, negative in (((1.0, 0.5, 0.25), False), ((0.25, 0.5, 1.0), True)):
        name = "margin_monotonicity:reversed" if negative else "margin_monotonicity"
        run = partial(
            checks.check_margin_monotonicity,
            config.grid,
            factors=factors,
            tol=config.exact_tolerance,
            name=name,
        )
        yield ScheduledCheck(name, 0.0, run, negative)


_SCHEDULES: dict[CheckFamily, Callable[[SuiteConfig], Iterator[ScheduledCheck]]] = {
    CheckFamily.CR: _cr,
    CheckFamily.PRODUCT_CLOSURE: _product_closure,
    CheckFamily.INVERSE_CLOSURE: _inverse_closure,
    CheckFamily.COMPOSITION: _composition,
    CheckFamily.HARMONICITY: _harmonicity,
    CheckFamily.GRADIENT_ORTHOGONALITY: _gradient_orthogonality,
    CheckFamily.FACTORIZATION: _factorization,
    CheckFamily.PHI_INTEGRAL: _phi_integral,
    CheckFamily.UNIT_NORM: _unit_norm,
    CheckFamily.SCHRODINGER: _schrodinger,
    CheckFamily.ASSOCIATED_SOLUTION: _associated_solution,
    CheckFamily.RANDOM_HOLOMORPHY: _random_holomorphy,
    CheckFamily.MARGIN_MONOTONICITY: _margin_monotonicity,
}


def schedule(config: SuiteConfig) -> list[ScheduledCheck]:
    """Every check the configuration asks for, negative controls included."""
    scheduled: list[ScheduledCheck] = []
    for family in sorted(set(config.families), key=lambda f: f.value):
        for item in _SCHEDULES[family](config):
            if item.negative and not config.negative_controls:
                continue
            scheduled.append(item)
    return scheduled


# =============================================================================
# Execution
# =============================================================================


def negative_control(inner: CheckReport) -> CheckReport:
    """Wrap a counterexample: passes iff the wrapped check did not pass."""
    return CheckReport.from_metric(
        f"{inner.name}:{NEGATIVE_SUFFIX}",
        1.0 if inner.passed else 0.0,
        0.0,
        inner.points_tested,
        details={
            "wrapped_status": inner.status.value,
            "wrapped_metric": "null" if inner.metric is None else inner.metric,
            "wrapped_tolerance": inner.tolerance,
        },
    )


def _execute(item: ScheduledCheck, logger: CheckLogger) -> CheckReport:
    logger.check_started(item.name)
    start = time.perf_counter()
    try:
        report = item.run()
    except NotApplicableError as exc:
        report = CheckReport.not_applicable(item.name, item.tolerance, exc.message)
    except SphereCRError as exc:
        logger.check_error(item.name, exc)
        report = CheckReport.from_error(item.name, item.tolerance, exc)
    except Exception as exc:
        # numpy and arithmetic errors outside the hierarchy
        logger.check_error(item.name, exc)
        report = CheckReport.from_error(item.name, item.tolerance, exc)

    skipped = int(report.measurements.get("skipped", 0))
    if skipped:
        logger.points_skipped(item.name, skipped, "singular or excluded points")
    if item.negative:
        report = negative_control(report)
    logger.check_completed(
        report.name,
        report.status.value,
        report.metric,
        report.tolerance,
        (time.perf_counter() - start) * 1000.0,
    )
    return report


def run_suite(config: Optional[SuiteConfig] = None) -> SuiteReport:
    """Run every scheduled check and collect the reports sorted by name."""
    if config is None:
        config = SuiteConfig()
    logger = CheckLogger(seed=config.seed, suite="verify")
    start = time.perf_counter()

    reports = sorted((_execute(item, logger) for item in schedule(config)), key=lambda r: r.name)

    wall_time_ms = (time.perf_counter() - start) * 1000.0
    logger.suite_completed(
        checks=len(reports),
        failed=sum(1 for r in reports if r.status != CheckStatus.PASS),
        wall_time_ms=wall_time_ms,
    )
    return SuiteReport(config=config, checks=reports, wall_time_ms=wall_time_ms)
