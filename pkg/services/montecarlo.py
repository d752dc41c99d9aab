"""Monte-Carlo ground truth under the Palm convention.

The typical UE sits at the origin and its serving BS at distance R. Other
pairs come from a PPP of density lambda_bs thinned to the active density
lambda_b, each BS carrying its UE as a mark at a Rayleigh distance. Trials
run in fixed-size chunks, each with its own Philox substream spawned from
the seed, so estimates do not depend on how many workers run the chunks.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Dict, Iterable, List, Optional

import numpy as np
import structlog
from scipy.spatial import cKDTree

from models.network import NetworkConfig
from models.power import OnOffPowerControl, PowerControlScheme, SchemeFamily
from models.report import Direction, DuplexMode, EngineKind, EstimateWithCI, PerformanceReport
from models.simulation import Z_95, Deployment, EdgeHandling, SimulationSpec
from services.errors import DomainError
from services.network import active_density, idle_probability, sample_link_distance
from services.power_control import build_scheme, sample_power

logger = structlog.get_logger(__name__)


def bernoulli_estimate(successes: np.ndarray) -> EstimateWithCI:
    n = successes.size
    mean = float(np.mean(successes))
    return EstimateWithCI(mean=mean, ci_halfwidth_95=Z_95 * math.sqrt(mean * (1.0 - mean) / n), n_trials=n)


def sample_mean_estimate(values: np.ndarray) -> EstimateWithCI:
    n = values.size
    mean = float(np.mean(values))
    spread = float(np.std(values, ddof=1)) if n > 1 else 0.0
    return EstimateWithCI(mean=mean, ci_halfwidth_95=Z_95 * spread / math.sqrt(n), n_trials=n)


def chunk_generators(spec: SimulationSpec) -> List[np.random.Generator]:
    n_chunks = -(-spec.n_trials // spec.chunk_size)
    streams = np.random.SeedSequence(spec.seed).spawn(n_chunks)
    return [np.random.Generator(np.random.Philox(stream)) for stream in streams]


def _chunk_sizes(spec: SimulationSpec) -> List[int]:
    full, rest = divmod(spec.n_trials, spec.chunk_size)
    return [spec.chunk_size] * full + ([rest] if rest else [])


def _check_window(config: NetworkConfig, spec: SimulationSpec) -> float:
    window = spec.resolved_window(config.lambda_bs)
    minimum = 10.0 / math.sqrt(config.lambda_bs)
    if window < minimum * (1 - 1e-12):
        raise DomainError(f"window radius {window:g} m is below 10/sqrt(lambda_bs) = {minimum:g} m")
    return window


def _uniform_points(rng: np.random.Generator, count: int, window: float, edge: EdgeHandling) -> np.ndarray:
    if edge is EdgeHandling.TORUS:
        return rng.uniform(-window, window, size=(count, 2))
    radius = window * np.sqrt(rng.random(count))
    angle = rng.uniform(0.0, 2.0 * math.pi, count)
    return np.column_stack((radius * np.cos(angle), radius * np.sin(angle)))


def _window_area(window: float, edge: EdgeHandling) -> float:
    return (2.0 * window) ** 2 if edge is EdgeHandling.TORUS else math.pi * window ** 2


def _offsets(rng: np.random.Generator, distances: np.ndarray) -> np.ndarray:
    angle = rng.uniform(0.0, 2.0 * math.pi, distances.shape)
    return np.column_stack((distances * np.cos(angle), distances * np.sin(angle)))


def _distance(points: np.ndarray, receiver: np.ndarray, window: float, edge: EdgeHandling) -> np.ndarray:
    diff = points - receiver
    if edge is EdgeHandling.TORUS:
        period = 2.0 * window
        diff = diff - period * np.round(diff / period)
    return np.hypot(diff[..., 0], diff[..., 1])


def sample_deployment(
    config: NetworkConfig,
    scheme: PowerControlScheme,
    spec: SimulationSpec,
    rng: np.random.Generator,
    link_distance: Optional[float] = None,
) -> Deployment:
    """One realization: the typical pair at index 0, then every BS of the window.

    BSs come from the full PPP of density lambda_bs; each is active with
    probability 1 - p0 independently, and inactive BSs carry zero power.
    `link_distance` pins the typical link instead of drawing it.
    """
    window = _check_window(config, spec)
    count = rng.poisson(config.lambda_bs * _window_area(window, spec.edge_handling))
    positions = _uniform_points(rng, count, window, spec.edge_handling)
    p0 = idle_probability(config.lambda_bs, config.lambda_ue)
    active = rng.random(count) >= p0
    distances = sample_link_distance(rng, config.lambda_bs, count)
    offsets = _offsets(rng, distances)
    powers = np.where(active, sample_power(scheme, distances, rng, config.alpha), 0.0)

    if link_distance is None:
        r0 = float(sample_link_distance(rng, config.lambda_bs))
    else:
        r0 = float(link_distance)
    serving_offset = _offsets(rng, np.array([r0]))
    typical_bs = -serving_offset  # UE at the origin
    typical_power = float(sample_power(scheme, r0, rng, config.alpha))
    return Deployment(
        bs_positions=np.vstack((typical_bs, positions)),
        ue_offsets=np.vstack((serving_offset, offsets)),
        powers=np.concatenate(([typical_power], powers)),
        active=np.concatenate(([True], active)),
    )


def aggregate_interference(
    deployment: Deployment,
    receiver: np.ndarray,
    exclude: int,
    config: NetworkConfig,
    rng: Optional[np.random.Generator] = None,
    window: Optional[float] = None,
    guard_fraction: float = 0.0,
    ue_always_on: bool = True,
    edge_handling: EdgeHandling = EdgeHandling.GUARD_ZONE,
    include_ues: bool = True,
) -> float:
    """Sum of P_i h_i d_i^-alpha + p_ue h'_i d'_i^-alpha over active pairs other than `exclude`.

    Without an rng every fading gain is 1. With a window the receiver must lie
    inside the window minus its guard zone; on a torus distances wrap.
    """
    receiver = np.asarray(receiver, dtype=float)
    if edge_handling is EdgeHandling.TORUS:
        if window is None:
            raise DomainError("torus distances need the window radius")
    elif window is not None and np.hypot(*receiver) > (1.0 - guard_fraction) * window:
        raise DomainError("receiver lies in the guard zone of the simulation window")
    keep = deployment.active.copy()
    if 0 <= exclude < len(deployment):
        keep[exclude] = False
    if not np.any(keep):
        return 0.0
    powers = deployment.powers[keep]
    d_bs = _distance(deployment.bs_positions[keep], receiver, window, edge_handling)
    d_ue = _distance(deployment.ue_positions[keep], receiver, window, edge_handling)
    if rng is None:
        h_bs = np.ones_like(d_bs)
        h_ue = np.ones_like(d_ue)
    else:
        h_bs = rng.exponential(1.0, d_bs.shape)
        h_ue = rng.exponential(1.0, d_ue.shape)
    if not include_ues:
        ue_on = np.zeros(powers.shape, dtype=bool)
    elif ue_always_on:
        ue_on = np.ones(powers.shape, dtype=bool)
    else:
        ue_on = powers > 0
    total = powers * h_bs * d_bs ** -config.alpha + ue_on * config.p_ue * h_ue * d_ue ** -config.alpha
    return float(np.sum(total))


def _simulate_chunk(
    config: NetworkConfig,
    scheme: PowerControlScheme,
    spec: SimulationSpec,
    n: int,
    rng: np.random.Generator,
    duplex: DuplexMode,
    link_distance: Optional[float],
    laplace_s: Optional[np.ndarray],
) -> Dict[str, np.ndarray]:
    """Trial loop over `sample_deployment` and `aggregate_interference`.

    HD trials see equal-power BSs only, no UE terms and no SI.
    """
    hd = duplex is DuplexMode.HD
    field_scheme = build_scheme(SchemeFamily.CPC, config) if hd else scheme
    on_off = isinstance(scheme, OnOffPowerControl) and not hd
    interference = partial(
        aggregate_interference,
        exclude=0,
        config=config,
        rng=rng,
        window=spec.resolved_window(config.lambda_bs),
        guard_fraction=spec.guard_fraction,
        ue_always_on=config.apc_ue_always_on or not on_off,
        edge_handling=spec.edge_handling,
        include_ues=not hd,
    )
    beta = 0.0 if hd else config.beta
    origin = np.zeros(2)

    dl = np.empty(n, dtype=bool)
    ul = np.empty(n, dtype=bool)
    serving_power = np.empty(n)
    laplace = np.empty((n, laplace_s.size)) if laplace_s is not None else None
    for trial in range(n):
        deployment = sample_deployment(config, field_scheme, spec, rng, link_distance)
        p_bs = float(deployment.powers[0])
        # DL is conditioned on the serving BS transmitting
        p_bs_dl = scheme.p_bar if on_off else p_bs
        p_ue_tx = p_bs if hd else config.p_ue
        i_ue = interference(deployment, origin)
        i_bs = interference(deployment, deployment.bs_positions[0])
        h_dl, h_ul = rng.exponential(1.0, 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            path_gain = deployment.link_distances[0] ** -config.alpha
            dl[trial] = p_bs_dl * h_dl * path_gain > config.theta_u * (beta * config.p_ue + i_ue)
            ul[trial] = p_ue_tx * h_ul * path_gain > config.theta_b * (beta * p_bs + i_bs)
        serving_power[trial] = p_bs
        if laplace is not None:
            laplace[trial] = np.exp(-laplace_s * i_ue)
    result = {"dl": dl, "ul": ul, "p0": serving_power}
    if laplace is not None:
        result["laplace"] = laplace
    return result


def _run(
    config: NetworkConfig,
    scheme: PowerControlScheme,
    spec: SimulationSpec,
    duplex: DuplexMode = DuplexMode.FD,
    link_distance: Optional[float] = None,
    laplace_s: Optional[np.ndarray] = None,
) -> Dict[str, np.ndarray]:
    window = _check_window(config, spec)
    if link_distance is not None:
        if link_distance < 0:
            raise DomainError(f"link distance must be non-negative, got {link_distance}")
        if spec.edge_handling is EdgeHandling.GUARD_ZONE and link_distance > (1.0 - spec.guard_fraction) * window:
            raise DomainError("fixed link distance puts the serving BS in the guard zone")
    sizes = _chunk_sizes(spec)
    rngs = chunk_generators(spec)

    def work(index: int) -> Dict[str, np.ndarray]:
        return _simulate_chunk(config, scheme, spec, sizes[index], rngs[index], duplex, link_distance, laplace_s)

    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            chunks = list(pool.map(work, range(len(sizes))))
    else:
        chunks = [work(index) for index in range(len(sizes))]
    merged = {key: np.concatenate([chunk[key] for chunk in chunks]) for key in chunks[0]}
    logger.debug("montecarlo_run", family=scheme.family.value, trials=spec.n_trials, chunks=len(sizes))
    return merged


def estimate_coverage(
    direction: Direction,
    config: NetworkConfig,
    scheme: PowerControlScheme,
    spec: SimulationSpec,
    duplex: DuplexMode = DuplexMode.FD,
    link_distance: Optional[float] = None,
) -> EstimateWithCI:
    """Fraction of trials whose SIR beats the threshold; DL is conditioned on the serving BS transmitting."""
    outcome = _run(config, scheme, spec, duplex, link_distance)
    return bernoulli_estimate(outcome[Direction(direction).value])


def empirical_laplace_curve(
    s_grid: Iterable[float], config: NetworkConfig, scheme: PowerControlScheme, spec: SimulationSpec
) -> List[EstimateWithCI]:
    """Sample means of exp(-s I) at the typical UE, every s from the same trials."""
    s = np.asarray(list(s_grid), dtype=float)
    if s.size == 0:
        return []
    if np.any(s < 0):
        raise DomainError(f"Laplace argument must be non-negative, got {s.min():g}")
    outcome = _run(config, scheme, spec, laplace_s=s)
    return [sample_mean_estimate(column) for column in outcome["laplace"].T]


def empirical_laplace(
    s: float, config: NetworkConfig, scheme: PowerControlScheme, spec: SimulationSpec
) -> EstimateWithCI:
    """Sample mean of exp(-s I) at the typical UE."""
    return empirical_laplace_curve([s], config, scheme, spec)[0]


def estimate_report(config: NetworkConfig, scheme: PowerControlScheme, spec: SimulationSpec) -> PerformanceReport:
    outcome = _run(config, scheme, spec)
    dl = outcome["dl"].astype(float)
    ul = outcome["ul"].astype(float)
    p0 = outcome["p0"]
    p_dl = bernoulli_estimate(outcome["dl"])
    p_ul = bernoulli_estimate(outcome["ul"])

    on_off = isinstance(scheme, OnOffPowerControl)
    delivery = scheme.xi if on_off and config.apc_rate_includes_xi else 1.0
    dl_delivered = dl * (p0 > 0) if on_off and config.apc_rate_includes_xi else dl
    ee = sample_mean_estimate(
        (config.rate_ue * dl_delivered + config.rate_bs * ul) / (p0 + config.p_ue + config.p_static)
    )
    lambda_b = active_density(config).lambda_b
    rate_ul = config.rate_bs * p_ul.mean
    rate_dl = config.rate_ue * p_dl.mean * delivery
    ci = {
        "p_ul": p_ul.ci_halfwidth_95,
        "p_dl": p_dl.ci_halfwidth_95,
        "rate_ul": config.rate_bs * p_ul.ci_halfwidth_95,
        "rate_dl": config.rate_ue * delivery * p_dl.ci_halfwidth_95,
        # UL and DL come from the same trials; add the half-widths
        "ase": lambda_b * (config.rate_bs * p_ul.ci_halfwidth_95 + config.rate_ue * delivery * p_dl.ci_halfwidth_95)
        / config.bandwidth_w,
        "ee": ee.ci_halfwidth_95,
    }
    return PerformanceReport(
        p_ul=p_ul.mean,
        p_dl=p_dl.mean,
        rate_ul=rate_ul,
        rate_dl=rate_dl,
        ase=lambda_b * (rate_ul + rate_dl) / config.bandwidth_w,
        ee=ee.mean,
        ci_halfwidth=ci,
        source=EngineKind.MONTE_CARLO,
    )


def empirical_idle_fraction(config: NetworkConfig, spec: SimulationSpec) -> EstimateWithCI:
    """Share of BSs whose Voronoi cell holds no UE, from jointly sampled BS and UE PPPs.

    Only BSs in the inner half of the window count, so their cells see the
    full UE field.
    """
    window = _check_window(config, spec)
    idle = []
    for size, rng in zip(_chunk_sizes(spec), chunk_generators(spec)):
        for _ in range(size):
            n_bs = rng.poisson(config.lambda_bs * math.pi * window ** 2)
            n_ue = rng.poisson(config.lambda_ue * math.pi * window ** 2)
            bs = _uniform_points(rng, n_bs, window, EdgeHandling.GUARD_ZONE)
            ue = _uniform_points(rng, n_ue, window, EdgeHandling.GUARD_ZONE)
            if n_bs == 0:
                continue
            served = np.zeros(n_bs, dtype=int)
            if n_ue:
                _, nearest = cKDTree(bs).query(ue)
                served = np.bincount(nearest, minlength=n_bs)
            inner = np.hypot(bs[:, 0], bs[:, 1]) <= 0.5 * window
            idle.append(served[inner] == 0)
    flags = np.concatenate(idle) if idle else np.zeros(0, dtype=bool)
    if flags.size == 0:
        raise DomainError("no BS fell inside the measurement region")
    return bernoulli_estimate(flags)
