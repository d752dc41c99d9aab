"""Self-consistency suites: bound sandwich, monotonicity, scheme reductions, closed forms, MC agreement."""

from typing import Callable, List, Sequence

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict

from config.settings import settings
from models.network import NetworkConfig
from models.power import SchemeFamily
from models.report import BoundKind, Direction, DuplexMode, PerformanceReport
from models.simulation import SimulationSpec
from services import analytic
from services.montecarlo import estimate_coverage
from services.network import db_to_linear
from services.power_control import build_scheme, reference_schemes

logger = structlog.get_logger(__name__)

REPORT_FIELDS = ("p_ul", "p_dl", "rate_ul", "rate_dl", "ase", "ee")


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    gap: float
    tolerance: float
    passed: bool


def _check(name: str, gap: float, tolerance: float, strict: bool = False) -> CheckResult:
    passed = gap < tolerance if strict else gap <= tolerance
    result = CheckResult(name=name, gap=gap, tolerance=tolerance, passed=bool(passed))
    log = logger.info if result.passed else logger.warning
    log("validation_check", name=name, gap=gap, tolerance=tolerance, passed=result.passed)
    return result


def _monotone_gap(values: Sequence[float], increasing: bool) -> float:
    """Negated smallest step in the required direction: below 0 only when strictly monotone."""
    steps = np.diff(values) if increasing else -np.diff(values)
    return float(-steps.min())


def sandwich_suite(config: NetworkConfig, quick: bool) -> List[CheckResult]:
    s_grid = np.logspace(8, 12, 5 if quick else 20)
    tolerance = settings.triple_rel_tol
    results = []
    for scheme in reference_schemes(config):
        gap = 0.0
        for s in s_grid:
            lower = analytic.laplace_bound(s, config, scheme, BoundKind.LOWER)
            upper = analytic.laplace_bound(s, config, scheme, BoundKind.UPPER)
            exact = analytic.laplace_exact(s, config, scheme)
            gap = max(gap, lower - exact, exact - upper)
        results.append(_check(f"sandwich[{scheme.family.value}]", gap, tolerance))
    return results


def monotonicity_suite(config: NetworkConfig, quick: bool) -> List[CheckResult]:
    kind = BoundKind.LOWER
    results = []

    powers = (0.2, 0.5, 1.0, 2.0)
    cpc = [build_scheme(SchemeFamily.CPC, config, p_max=p) for p in powers]
    results.append(
        _check("power[p_dl]", _monotone_gap([analytic.coverage_dl(config, s, kind) for s in cpc], True), 0.0, strict=True)
    )
    results.append(
        _check("power[p_ul]", _monotone_gap([analytic.coverage_ul(config, s, kind) for s in cpc], False), 0.0, strict=True)
    )

    schemes = reference_schemes(config)[:1] if quick else reference_schemes(config)
    for scheme in schemes:
        family = scheme.family.value
        betas = [config.with_updates(beta=b) for b in (0.0, 1e-12, 1e-10, 1e-8)]
        thetas = [
            config.with_updates(rate_bs=_rate_for(config, t), rate_ue=_rate_for(config, t))
            for t in (db_to_linear(-3.0), 1.0, db_to_linear(3.0), db_to_linear(6.0))
        ]
        for axis, configs in (("beta", betas), ("theta", thetas)):
            for direction, coverage in (("p_ul", analytic.coverage_ul), ("p_dl", analytic.coverage_dl)):
                values = [coverage(c, scheme, kind) for c in configs]
                results.append(_check(f"{axis}[{family},{direction}]", _monotone_gap(values, False), 0.0, strict=True))
    return results


def _rate_for(config: NetworkConfig, theta: float) -> float:
    """Target rate whose threshold 2^(R/W) - 1 equals theta."""
    return config.bandwidth_w * float(np.log2(1.0 + theta))


def _max_relative_gap(left: PerformanceReport, right: PerformanceReport) -> float:
    gaps = []
    for field in REPORT_FIELDS:
        a, b = getattr(left, field), getattr(right, field)
        gaps.append(abs(a - b) / max(abs(b), 1e-300))
    return max(gaps)


def reduction_suite(config: NetworkConfig, quick: bool) -> List[CheckResult]:
    cpc = build_scheme(SchemeFamily.CPC, config)
    reduced = (
        build_scheme(SchemeFamily.APC, config, p_bar=config.p_max, xi=1.0),
        build_scheme(SchemeFamily.FPC, config, p_bar=config.p_max, epsilon=0.0),
    )
    kinds = (BoundKind.LOWER,) if quick else (BoundKind.LOWER, BoundKind.UPPER)
    results = []
    for kind in kinds:
        reference = analytic.analytic_report(config, cpc, kind)
        for scheme in reduced:
            gap = _max_relative_gap(analytic.analytic_report(config, scheme, kind), reference)
            results.append(_check(f"reduction[{scheme.family.value}->cpc,{kind.value}]", gap, 1e-9))
    return results


def closed_form_suite(config: NetworkConfig, quick: bool) -> List[CheckResult]:
    results = []
    for name, theta in (("theta_b", config.theta_b), ("theta_u", config.theta_u)):
        closed = analytic.hd_coverage(config, theta)
        gap = abs(analytic.hd_coverage_quadrature(config, theta) - closed) / closed
        results.append(_check(f"hd_closed_form[{name}]", gap, 1e-6))
    return results


def monte_carlo_suite(config: NetworkConfig, quick: bool) -> List[CheckResult]:
    spec = SimulationSpec(n_trials=4000) if quick else SimulationSpec()
    cpc = build_scheme(SchemeFamily.CPC, config)
    results = []

    hd = estimate_coverage(Direction.DL, config, cpc, spec, duplex=DuplexMode.HD)
    closed = analytic.hd_coverage(config, config.theta_u)
    results.append(_check("mc_vs_closed_form[hd,p_dl]", abs(hd.mean - closed), 2.0 * hd.ci_halfwidth_95))

    for direction, coverage in ((Direction.DL, analytic.coverage_dl), (Direction.UL, analytic.coverage_ul)):
        estimate = estimate_coverage(direction, config, cpc, spec)
        lower = coverage(config, cpc, BoundKind.LOWER)
        upper = coverage(config, cpc, BoundKind.UPPER)
        lo, hi = min(lower, upper), max(lower, upper)
        gap = max(0.0, lo - estimate.mean, estimate.mean - hi)
        results.append(_check(f"mc_in_bounds[cpc,{direction.value}]", gap, 2.0 * estimate.ci_halfwidth_95))
    return results


SUITES: Sequence[Callable[[NetworkConfig, bool], List[CheckResult]]] = (
    closed_form_suite,
    reduction_suite,
    monotonicity_suite,
    sandwich_suite,
    monte_carlo_suite,
)


def run_suites(config: NetworkConfig, quick: bool = False) -> List[CheckResult]:
    results = []
    for suite in SUITES:
        results.extend(suite(config, quick))
    failed = [r.name for r in results if not r.passed]
    logger.info("validation_done", checks=len(results), failed=failed)
    return results
