"""Downlink power-control schemes: sampling, marginal laws and moment queries."""

import math
from typing import Callable, Tuple, Union

import numpy as np
import structlog
from pydantic import TypeAdapter

from models.network import NetworkConfig
from models.power import (
    ConstantPowerControl,
    FractionalPowerControl,
    MixedPowerDistribution,
    OnOffPowerControl,
    PowerControlScheme,
    SchemeFamily,
    UniformPowerControl,
)
from services.errors import DomainError
from services.quadrature import DEFAULT_SPEC, QuadratureSpec, expect_exponential, integrate_finite, integrate_semi_infinite

logger = structlog.get_logger(__name__)

ArrayLike = Union[float, np.ndarray]

_scheme_adapter = TypeAdapter(PowerControlScheme)

# default fractional exponent
DEFAULT_EPSILON = 0.1


def build_scheme(family: Union[str, SchemeFamily], config: NetworkConfig, **params) -> PowerControlScheme:
    """Build a scheme, filling unset parameters from the network config.

    FPC needs `p_bar` and APC needs `xi`; there is no sensible default for either.
    """
    family = SchemeFamily(family)
    params = {key: value for key, value in params.items() if value is not None}
    params.setdefault("p_max", config.p_max)
    if family is SchemeFamily.UPC:
        params.setdefault("p_min", config.p_min)
    elif family is SchemeFamily.FPC:
        params.setdefault("epsilon", DEFAULT_EPSILON)
        if "p_bar" not in params:
            raise DomainError("FPC requires parameter 'p_bar'")
    elif family is SchemeFamily.APC:
        params.setdefault("p_bar", params["p_max"])
        if "xi" not in params:
            raise DomainError("APC requires parameter 'xi'")
    scheme = _scheme_adapter.validate_python({"family": family, **params})
    if scheme.p_max > config.p_max * (1 + 1e-12):
        raise DomainError(f"scheme p_max ({scheme.p_max} W) exceeds the network peak ({config.p_max} W)")
    return scheme


def scheme_from_parameters(family: SchemeFamily, values, config: NetworkConfig) -> PowerControlScheme:
    """Inverse of `scheme.parameters` for the optimizer's search space."""
    from models.optimization import FAMILY_PARAMETERS

    return build_scheme(family, config, **dict(zip(FAMILY_PARAMETERS[family], values)))


def fpc_power(scheme: FractionalPowerControl, link_distance: ArrayLike, alpha: float) -> ArrayLike:
    power = scheme.p_bar * np.power(link_distance, alpha * scheme.epsilon)
    return np.minimum(power, scheme.p_max)


def sample_power(
    scheme: PowerControlScheme,
    link_distance: ArrayLike,
    rng: np.random.Generator,
    alpha: float,
) -> ArrayLike:
    """Per-BS transmit power; vectorized over link distances."""
    link_distance = np.asarray(link_distance, dtype=float)
    if np.any(link_distance < 0):
        raise DomainError("link distance must be non-negative")
    shape = link_distance.shape
    # one uniform per draw for every family keeps seeded streams aligned across schemes
    u = np.asarray(rng.random(shape))
    if isinstance(scheme, ConstantPowerControl):
        power = np.full(shape, scheme.p_max)
    elif isinstance(scheme, UniformPowerControl):
        power = scheme.p_min + (scheme.p_max - scheme.p_min) * u
    elif isinstance(scheme, FractionalPowerControl):
        power = fpc_power(scheme, link_distance, alpha)
    elif isinstance(scheme, OnOffPowerControl):
        power = np.where(u < scheme.xi, scheme.p_bar, 0.0)
    else:
        raise DomainError(f"unknown power-control scheme {scheme!r}")
    power = np.asarray(power, dtype=float)
    return float(power) if power.ndim == 0 else power


def marginal_distribution(scheme: PowerControlScheme, lambda_bs: float, alpha: float) -> MixedPowerDistribution:
    if isinstance(scheme, ConstantPowerControl):
        return MixedPowerDistribution(p_max=scheme.p_max, atoms=((scheme.p_max, 1.0),))

    if isinstance(scheme, UniformPowerControl):
        width = scheme.p_max - scheme.p_min
        return MixedPowerDistribution(
            p_max=scheme.p_max,
            continuous_density=lambda x: 1.0 / width if scheme.p_min <= x <= scheme.p_max else 0.0,
            continuous_support=(scheme.p_min, scheme.p_max),
        )

    if isinstance(scheme, OnOffPowerControl):
        atoms = tuple((loc, mass) for loc, mass in ((scheme.p_bar, scheme.xi), (0.0, 1.0 - scheme.xi)) if mass > 0)
        return MixedPowerDistribution(p_max=scheme.p_max, atoms=atoms)

    if isinstance(scheme, FractionalPowerControl):
        return _fractional_distribution(scheme, lambda_bs, alpha)

    raise DomainError(f"unknown power-control scheme {scheme!r}")


# exp(-u) underflows to 0.0 past this
_LOG_UNDERFLOW = math.log(-math.log(np.finfo(float).tiny))


def _fractional_distribution(scheme: FractionalPowerControl, lambda_bs: float, alpha: float) -> MixedPowerDistribution:
    if scheme.epsilon == 0:
        # density divides by epsilon; the scheme is a constant
        return MixedPowerDistribution(p_max=scheme.p_max, atoms=((min(scheme.p_bar, scheme.p_max), 1.0),))

    k = 2.0 / (alpha * scheme.epsilon)
    log_pi_lambda = math.log(math.pi * lambda_bs)
    # U = pi lambda R^2 ~ Exp(1); the power stays below the peak while U < u_clip
    log_u_clip = log_pi_lambda + k * math.log(scheme.p_max / scheme.p_bar)
    if log_u_clip > _LOG_UNDERFLOW:
        u_clip = math.inf
        peak_mass = 0.0
    else:
        u_clip = math.exp(log_u_clip)
        peak_mass = math.exp(-u_clip)

    def density(x: float) -> float:
        if not 0.0 < x < scheme.p_max:
            return 0.0
        log_u = log_pi_lambda + k * math.log(x / scheme.p_bar)
        if log_u > _LOG_UNDERFLOW:
            return 0.0
        u = math.exp(log_u)
        return k * u / x * math.exp(-u)

    def expectation(fn: Callable[[float], float], spec: QuadratureSpec = DEFAULT_SPEC) -> float:
        # P = p_bar (U / (pi lambda))^(1/k) on the unclipped branch
        def integrand(u: float) -> float:
            return fn(scheme.p_bar * (u / (math.pi * lambda_bs)) ** (1.0 / k)) * math.exp(-u)

        if math.isinf(u_clip):
            return integrate_semi_infinite(integrand, 0.0, 1.0, spec)
        return integrate_finite(integrand, 0.0, u_clip, spec)

    return MixedPowerDistribution(
        p_max=scheme.p_max,
        atoms=((scheme.p_max, peak_mass),),
        continuous_density=density,
        continuous_support=(0.0, scheme.p_max),
        continuous_expectation=expectation,
    )


def expect(dist: MixedPowerDistribution, fn: Callable[[float], float], spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """E{fn(P)}: quadrature over the continuous part plus the atom sum."""
    total = sum(mass * fn(loc) for loc, mass in dist.atoms)
    if dist.has_continuous_part:
        if dist.continuous_expectation is not None:
            total += dist.continuous_expectation(fn, spec)
        else:
            lo, hi = dist.continuous_support
            total += integrate_finite(lambda x: fn(x) * dist.continuous_density(x), lo, hi, spec)
    return total


def total_mass(dist: MixedPowerDistribution, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    return expect(dist, lambda x: 1.0, spec)


def mean_power(dist: MixedPowerDistribution, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    return expect(dist, lambda x: x, spec)


def moment_delta(dist: MixedPowerDistribution, delta: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """E{P^delta}; atoms at zero contribute nothing."""
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    return expect(dist, lambda x: x ** delta if x > 0 else 0.0, spec)


def compound_kernel(power: float, p_ue: float, delta: float) -> float:
    """(p_ue^(1+d) - P^(1+d)) / (p_ue - P), continuously extended at P = p_ue."""
    t = power / p_ue
    x = t - 1.0
    if abs(x) < 1e-4:
        # series in x; truncation error O(x^3)
        ratio = (1.0 + delta) * (1.0 + delta * x / 2.0 + delta * (delta - 1.0) * x * x / 6.0)
    else:
        ratio = math.expm1((1.0 + delta) * math.log(t)) / x if t > 0 else 1.0 / (1.0 - t)
    return p_ue ** delta * ratio


def compound_moment(
    dist: MixedPowerDistribution,
    p_ue: float,
    delta: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    ue_with_sleeping_bs: bool = True,
) -> float:
    """E{h(P)} with h the compound kernel.

    A BS asleep at P = 0 contributes p_ue^delta through its paired UE, unless
    that UE is silent too (`ue_with_sleeping_bs=False`).
    """
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if p_ue <= 0:
        raise DomainError(f"p_ue must be positive, got {p_ue}")

    def kernel(x: float) -> float:
        if x <= 0:
            return p_ue ** delta if ue_with_sleeping_bs else 0.0
        return compound_kernel(x, p_ue, delta)

    return expect(dist, kernel, spec)


def link_distance_expectation(fn: Callable[[float], float], lambda_bs: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """E{fn(R)} for R with the Rayleigh link-distance law."""
    return expect_exponential(lambda u: fn(math.sqrt(u / (math.pi * lambda_bs))), spec)


def reference_schemes(config: NetworkConfig) -> Tuple[PowerControlScheme, ...]:
    """One scheme per family at default levels, used by the validation suites."""
    return (
        build_scheme(SchemeFamily.CPC, config),
        build_scheme(SchemeFamily.UPC, config),
        build_scheme(SchemeFamily.FPC, config, p_bar=config.p_min, epsilon=DEFAULT_EPSILON),
        build_scheme(SchemeFamily.APC, config, xi=0.5),
    )
