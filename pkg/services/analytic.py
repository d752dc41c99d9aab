"""Closed-form and quadrature evaluation of coverage, rates, ASE and EE.

Every coverage is an expectation over the serving link distance R (and the
serving power P) of exp(-s P_r beta) L_I(s) at s = theta R^alpha / P_t, where
L_I is the Laplace transform of the interference in one of three kinds:
the exact transform, or the upper/lower bound of the common form
exp(-lambda_b C g s^delta) with C = pi^2 delta / sin(pi delta).
"""

import math
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
import structlog
from scipy.interpolate import PchipInterpolator
from scipy.special import i0e

from config.settings import settings
from models.network import NetworkConfig
from models.power import FractionalPowerControl, MixedPowerDistribution, OnOffPowerControl, PowerControlScheme
from models.report import BoundKind, DuplexMode, EngineKind, LaplaceQuery, PerformanceReport
from services.errors import DomainError
from services.network import active_density
from services.power_control import (
    compound_moment,
    expect,
    fpc_power,
    link_distance_expectation,
    marginal_distribution,
    moment_delta,
)
from services.quadrature import DEFAULT_SPEC, TRIPLE_SPEC, QuadratureSpec, integrate_finite, integrate_semi_infinite

logger = structlog.get_logger(__name__)


def _kernel_rate(config: NetworkConfig) -> float:
    """lambda_b * pi^2 delta / sin(pi delta)."""
    return active_density(config).lambda_b * config.delta.kernel


def _ue_silent_when_asleep(config: NetworkConfig, scheme: PowerControlScheme) -> bool:
    return isinstance(scheme, OnOffPowerControl) and not config.apc_ue_always_on


def interference_moment(config: NetworkConfig, scheme: PowerControlScheme, kind: BoundKind) -> float:
    """g(delta, P): compound kernel for the upper bound, sum of delta-moments for the lower."""
    if kind is BoundKind.EXACT:
        raise DomainError("the exact transform has no single moment; use exact_laplace_table")
    delta = config.delta.value
    dist = marginal_distribution(scheme, config.lambda_bs, config.alpha)
    silent = _ue_silent_when_asleep(config, scheme)
    if kind is BoundKind.UPPER:
        return compound_moment(dist, config.p_ue, delta, ue_with_sleeping_bs=not silent)
    ue_share = scheme.xi if silent else 1.0
    return ue_share * config.p_ue ** delta + moment_delta(dist, delta)


def laplace_bound(s: float, config: NetworkConfig, scheme: PowerControlScheme, kind: BoundKind) -> float:
    if s < 0:
        raise DomainError(f"Laplace argument must be non-negative, got {s}")
    if s == 0:
        return 1.0
    g = interference_moment(config, scheme, kind)
    return math.exp(-_kernel_rate(config) * g * s ** config.delta.value)


def _ue_interference_gap(
    v: float, s: float, config: NetworkConfig, spec: QuadratureSpec
) -> float:
    """1 - E{1 / (1 + s p_ue d^-alpha)} for an interferer at distance v whose UE is displaced by the mark.

    The mark is an isotropic Gaussian with per-axis variance 1/(2 pi lambda),
    so the angular average is exp(-pi lambda (rho - v)^2) i0e(2 pi lambda rho v).
    """
    lam = config.lambda_bs
    alpha = config.alpha
    sp = s * config.p_ue
    rho_bump = sp ** (1.0 / alpha)
    spread = 1.0 / math.sqrt(math.pi * lam)

    def integrand(rho: float) -> float:
        if rho <= 0:
            return 0.0
        near = sp / (sp + rho ** alpha)
        ring = math.exp(-math.pi * lam * (rho - v) ** 2) * i0e(2.0 * math.pi * lam * rho * v)
        return near * rho * ring

    upper = v + 8.0 * spread
    breaks = sorted({b for b in (rho_bump, v) if 0 < b < upper})
    total = 0.0
    lo = 0.0
    for hi in breaks + [upper]:
        total += integrate_finite(integrand, lo, hi, spec)
        lo = hi
    return 2.0 * math.pi * lam * total


def _exact_exponent(
    s: float, config: NetworkConfig, scheme: PowerControlScheme, spec: QuadratureSpec = TRIPLE_SPEC
) -> float:
    """-ln L_I(s) / lambda_b for the exact transform."""
    delta = config.delta.value
    alpha = config.alpha
    dist = marginal_distribution(scheme, config.lambda_bs, alpha)
    silent = _ue_silent_when_asleep(config, scheme)
    inner_spec = spec.loosened(0.1)

    # BS part: closed form in the delta-moment
    bs_part = config.delta.kernel * s ** delta * moment_delta(dist, delta)

    def bs_miss(v: float) -> float:
        # E{1 / (1 + s P v^-alpha)} over pairs whose UE transmits
        va = v ** alpha

        def one(p: float) -> float:
            if p <= 0:
                return 0.0 if silent else 1.0
            return va / (va + s * p)

        return expect(dist, one, inner_spec)

    def integrand(v: float) -> float:
        if v <= 0:
            return 0.0
        return bs_miss(v) * _ue_interference_gap(v, s, config, inner_spec) * v

    scale = max((s * max(config.p_ue, dist.p_max)) ** (1.0 / alpha), 1.0 / math.sqrt(math.pi * config.lambda_bs))
    ue_part = 2.0 * math.pi * integrate_semi_infinite(integrand, 0.0, scale, spec)
    return bs_part + ue_part


def laplace_exact(
    s: float, config: NetworkConfig, scheme: PowerControlScheme, spec: QuadratureSpec = TRIPLE_SPEC
) -> float:
    if s < 0:
        raise DomainError(f"Laplace argument must be non-negative, got {s}")
    if s == 0:
        return 1.0
    exponent = active_density(config).lambda_b * _exact_exponent(s, config, scheme, spec)
    value = math.exp(-exponent)
    logger.debug("laplace_exact", s=s, value=value, family=scheme.family.value)
    return value


class ExactLaplaceTable:
    """Effective moment g(s) = -ln L_exact(s) / (lambda_b C s^delta), tabulated in log s.

    g(s) moves from the lower-bound moment (s -> 0) to the upper-bound moment
    (s -> inf); outside the grid it is held at the end values.
    """

    def __init__(self, config: NetworkConfig, scheme: PowerControlScheme, points: int = settings.exact_table_points):
        self.config = config
        self.scheme = scheme
        dist = marginal_distribution(scheme, config.lambda_bs, config.alpha)
        spread = 1.0 / math.sqrt(math.pi * config.lambda_bs)
        # interference radius (s p)^(1/alpha) from 1e-3 to 1e2 mark spreads
        radii = spread * np.logspace(-3.0, 2.0, points)
        self.log_s = np.log(radii ** config.alpha / max(config.p_ue, dist.p_max))
        kernel = config.delta.kernel
        delta = config.delta.value
        self.g = np.array(
            [_exact_exponent(math.exp(ls), config, scheme) / (kernel * math.exp(ls) ** delta) for ls in self.log_s]
        )
        self._interp = PchipInterpolator(self.log_s, self.g, extrapolate=False)
        logger.info("exact_laplace_table", family=scheme.family.value, g_min=float(self.g.min()), g_max=float(self.g.max()))

    def moment(self, s: float) -> float:
        ls = math.log(s)
        if ls <= self.log_s[0]:
            return float(self.g[0])
        if ls >= self.log_s[-1]:
            return float(self.g[-1])
        return float(self._interp(ls))

    def __call__(self, s: float) -> float:
        if s <= 0:
            return 1.0
        return math.exp(-_kernel_rate(self.config) * self.moment(s) * s ** self.config.delta.value)


@lru_cache(maxsize=64)
def exact_laplace_table(config: NetworkConfig, scheme: PowerControlScheme) -> ExactLaplaceTable:
    return ExactLaplaceTable(config, scheme)


def evaluate_laplace(query: LaplaceQuery, kind: BoundKind) -> float:
    """L_I at one query point; the exact kind runs the full integral rather than the table."""
    if kind is BoundKind.EXACT:
        return laplace_exact(query.s, query.config, query.scheme)
    return laplace_bound(query.s, query.config, query.scheme, kind)


def _laplace_of(config: NetworkConfig, scheme: PowerControlScheme, kind: BoundKind) -> Callable[[float], float]:
    """L_I as a fast callable of s for repeated use inside R-expectations."""
    if kind is BoundKind.EXACT:
        return exact_laplace_table(config, scheme)
    rate = _kernel_rate(config) * interference_moment(config, scheme, kind)
    delta = config.delta.value
    return lambda s: math.exp(-rate * s ** delta) if s > 0 else 1.0


def _success(
    r: float, p_t: float, p_r: float, theta: float, config: NetworkConfig, laplace: Callable[[float], float]
) -> float:
    """P(SIR > theta | R = r, powers) under Rayleigh fading on the desired link."""
    if p_t <= 0:
        return 0.0
    s = theta * r ** config.alpha / p_t
    return math.exp(-s * p_r * config.beta) * laplace(s)


def _serving_law(
    config: NetworkConfig, scheme: PowerControlScheme, transmitting_only: bool
) -> MixedPowerDistribution:
    dist = marginal_distribution(scheme, config.lambda_bs, config.alpha)
    if not transmitting_only:
        return dist
    atoms = tuple((loc, mass) for loc, mass in dist.atoms if loc > 0)
    if not dist.has_continuous_part:
        mass = sum(m for _, m in atoms)
        if mass <= 0:
            # never transmits; condition on the nominal level
            return MixedPowerDistribution(p_max=dist.p_max, atoms=((scheme.p_bar, 1.0),))
        atoms = tuple((loc, m / mass) for loc, m in atoms)
    return MixedPowerDistribution(
        p_max=dist.p_max,
        atoms=atoms,
        continuous_density=dist.continuous_density,
        continuous_support=dist.continuous_support,
        continuous_expectation=dist.continuous_expectation,
    )


def expect_serving(
    config: NetworkConfig,
    scheme: PowerControlScheme,
    fn: Callable[[float, float], float],
    transmitting_only: bool = False,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """E_{P,R}{fn(R, P)} with the serving power law of the scheme (FPC: P = P(R))."""
    if isinstance(scheme, FractionalPowerControl) and scheme.epsilon > 0:
        return link_distance_expectation(
            lambda r: fn(r, float(fpc_power(scheme, r, config.alpha))), config.lambda_bs, spec
        )
    law = _serving_law(config, scheme, transmitting_only)
    return expect(law, lambda p: link_distance_expectation(lambda r: fn(r, p), config.lambda_bs, spec), spec)


def coverage_generic(
    p_t: float, p_r: float, theta: float, config: NetworkConfig, scheme: PowerControlScheme, kind: BoundKind
) -> float:
    """Coverage at fixed transmit/receive powers, averaged over R only."""
    if p_t <= 0 or p_r < 0:
        raise DomainError("transmit power must be positive and receive-side power non-negative")
    if theta < 0:
        raise DomainError(f"threshold must be non-negative, got {theta}")
    laplace = _laplace_of(config, scheme, kind)
    return link_distance_expectation(lambda r: _success(r, p_t, p_r, theta, config, laplace), config.lambda_bs)


def _ul_success(config, laplace):
    # the UE transmits, the serving BS leaks its own power P into its receiver
    return lambda r, p: _success(r, config.p_ue, p, config.theta_b, config, laplace)


def _dl_success(config, laplace):
    return lambda r, p: _success(r, p, config.p_ue, config.theta_u, config, laplace)


def coverage_ul(config: NetworkConfig, scheme: PowerControlScheme, kind: BoundKind) -> float:
    return expect_serving(config, scheme, _ul_success(config, _laplace_of(config, scheme, kind)))


def coverage_dl(config: NetworkConfig, scheme: PowerControlScheme, kind: BoundKind) -> float:
    """DL coverage, conditioned on the serving BS transmitting."""
    return expect_serving(
        config, scheme, _dl_success(config, _laplace_of(config, scheme, kind)), transmitting_only=True
    )


def dl_delivery_factor(config: NetworkConfig, scheme: PowerControlScheme) -> float:
    """Share of slots in which the serving BS actually sends DL data."""
    if isinstance(scheme, OnOffPowerControl) and config.apc_rate_includes_xi:
        return scheme.xi
    return 1.0


def fd_sum_rate(config: NetworkConfig, scheme: PowerControlScheme, kind: BoundKind) -> Tuple[float, float, float]:
    rate_ul = config.rate_bs * coverage_ul(config, scheme, kind)
    rate_dl = config.rate_ue * coverage_dl(config, scheme, kind) * dl_delivery_factor(config, scheme)
    return rate_ul, rate_dl, rate_ul + rate_dl


def hd_coverage(config: NetworkConfig, theta: float) -> float:
    """HD coverage with equal-power BS interferers only: closed-form Rayleigh integral."""
    lam_pi = config.lambda_bs * math.pi
    return lam_pi / (lam_pi + _kernel_rate(config) * theta ** config.delta.value)


def hd_coverage_quadrature(config: NetworkConfig, theta: float) -> float:
    rate = _kernel_rate(config)
    delta = config.delta.value
    return link_distance_expectation(
        lambda r: math.exp(-rate * (theta * r ** config.alpha) ** delta), config.lambda_bs
    )


def hd_rates(config: NetworkConfig) -> Tuple[float, float]:
    """(rate_ul, rate_dl) of the half-duplex baseline, with the 0.5 pre-log."""
    w = config.bandwidth_w
    rate_ul = 0.5 * w * math.log2(1.0 + config.theta_b) * hd_coverage(config, config.theta_b)
    rate_dl = 0.5 * w * math.log2(1.0 + config.theta_u) * hd_coverage(config, config.theta_u)
    return rate_ul, rate_dl


def ase(config: NetworkConfig, scheme: PowerControlScheme, kind: BoundKind) -> float:
    """Area spectrum efficiency in bps/Hz/m^2."""
    rate_ul, rate_dl, _ = fd_sum_rate(config, scheme, kind)
    return active_density(config).lambda_b * (rate_ul + rate_dl) / config.bandwidth_w


def ee(config: NetworkConfig, scheme: PowerControlScheme, kind: BoundKind) -> float:
    """Energy efficiency in bps/J; the consumed power depends on the serving P."""
    laplace = _laplace_of(config, scheme, kind)
    ul = _ul_success(config, laplace)
    dl = _dl_success(config, laplace)
    on_off = isinstance(scheme, OnOffPowerControl)

    def delivered(r: float, p: float) -> float:
        if p > 0:
            dl_part = dl(r, p)
        elif on_off and not config.apc_rate_includes_xi:
            dl_part = dl(r, scheme.p_bar)
        else:
            dl_part = 0.0
        return (config.rate_ue * dl_part + config.rate_bs * ul(r, p)) / (p + config.p_ue + config.p_static)

    return expect_serving(config, scheme, delivered)


def analytic_report(config: NetworkConfig, scheme: PowerControlScheme, kind: BoundKind) -> PerformanceReport:
    p_ul = coverage_ul(config, scheme, kind)
    p_dl = coverage_dl(config, scheme, kind)
    rate_ul = config.rate_bs * p_ul
    rate_dl = config.rate_ue * p_dl * dl_delivery_factor(config, scheme)
    return PerformanceReport(
        p_ul=min(max(p_ul, 0.0), 1.0),
        p_dl=min(max(p_dl, 0.0), 1.0),
        rate_ul=rate_ul,
        rate_dl=rate_dl,
        ase=active_density(config).lambda_b * (rate_ul + rate_dl) / config.bandwidth_w,
        ee=ee(config, scheme, kind),
        source=EngineKind.from_bound(kind),
    )


def rate_given_distance(
    r: float, config: NetworkConfig, scheme: PowerControlScheme, kind: BoundKind, mode: DuplexMode
) -> float:
    """Sum UL+DL rate with the serving link frozen at distance r; the interference field is unchanged."""
    if r < 0:
        raise DomainError(f"link distance must be non-negative, got {r}")
    if mode is DuplexMode.HD:
        w = config.bandwidth_w
        rate = _kernel_rate(config)
        delta = config.delta.value
        total = 0.0
        for theta in (config.theta_b, config.theta_u):
            total += 0.5 * w * math.log2(1.0 + theta) * math.exp(-rate * (theta * r ** config.alpha) ** delta)
        return total

    laplace = _laplace_of(config, scheme, kind)
    ul = _ul_success(config, laplace)
    dl = _dl_success(config, laplace)
    if isinstance(scheme, FractionalPowerControl):
        p = float(fpc_power(scheme, r, config.alpha))
        return config.rate_bs * ul(r, p) + config.rate_ue * dl(r, p)
    law = _serving_law(config, scheme, transmitting_only=False)
    on_law = _serving_law(config, scheme, transmitting_only=True)
    p_ul = expect(law, lambda p: ul(r, p))
    p_dl = expect(on_law, lambda p: dl(r, p))
    return config.rate_bs * p_ul + config.rate_ue * p_dl * dl_delivery_factor(config, scheme)


def hd_report(config: NetworkConfig) -> PerformanceReport:
    """Half-duplex baseline: equal-power BSs, no SI, each direction gets half the slot."""
    p_ul = hd_coverage(config, config.theta_b)
    p_dl = hd_coverage(config, config.theta_u)
    rate_ul, rate_dl = hd_rates(config)
    # BS and UE each transmit half of the time
    consumed = 0.5 * (config.p_max + config.p_ue) + config.p_static
    return PerformanceReport(
        p_ul=p_ul,
        p_dl=p_dl,
        rate_ul=rate_ul,
        rate_dl=rate_dl,
        ase=active_density(config).lambda_b * (rate_ul + rate_dl) / config.bandwidth_w,
        ee=(rate_ul + rate_dl) / consumed,
        source=EngineKind.EXACT,
    )
