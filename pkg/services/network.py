"""Deployment-independent primitives: link-distance law, idle probability, active density."""

import math
from typing import Tuple, Union

import numpy as np

from models.network import ActiveDensity, NetworkConfig
from services.errors import DomainError

ArrayLike = Union[float, np.ndarray]

# Shape constant of the gamma approximation to the normalized Voronoi cell area
CELL_SHAPE = 3.5


def idle_probability(lambda_bs: float, lambda_ue: float) -> float:
    """Probability that a BS has no UE in its cell."""
    if lambda_bs <= 0:
        raise DomainError(f"lambda_bs must be positive, got {lambda_bs}")
    if lambda_ue < 0:
        raise DomainError(f"lambda_ue must be non-negative, got {lambda_ue}")
    return (1.0 + lambda_ue / (CELL_SHAPE * lambda_bs)) ** (-CELL_SHAPE)


def active_density(config: NetworkConfig) -> ActiveDensity:
    p0 = idle_probability(config.lambda_bs, config.lambda_ue)
    return ActiveDensity(lambda_b=(1.0 - p0) * config.lambda_bs, p0=p0)


def link_distance_pdf(r: ArrayLike, lambda_bs: float) -> ArrayLike:
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("link distance must be non-negative")
    value = 2.0 * math.pi * lambda_bs * r * np.exp(-lambda_bs * math.pi * r ** 2)
    return float(value) if value.ndim == 0 else value


def link_distance_cdf(r: ArrayLike, lambda_bs: float) -> ArrayLike:
    r = np.asarray(r, dtype=float)
    value = np.where(r > 0, -np.expm1(-lambda_bs * math.pi * np.maximum(r, 0.0) ** 2), 0.0)
    return float(value) if value.ndim == 0 else value


def link_distance_from_uniform(u: ArrayLike, lambda_bs: float) -> ArrayLike:
    """Inverse CDF; u in (0, 1] with u = 1 mapping to distance 0."""
    return np.sqrt(-np.log(u) / (math.pi * lambda_bs))


def sample_link_distance(rng: np.random.Generator, lambda_bs: float, size=None) -> ArrayLike:
    if lambda_bs <= 0:
        raise DomainError(f"lambda_bs must be positive, got {lambda_bs}")
    # 1 - U lies in (0, 1]
    u = 1.0 - rng.random(size)
    return link_distance_from_uniform(u, lambda_bs)


def mean_link_distance(lambda_bs: float) -> float:
    return 1.0 / (2.0 * math.sqrt(lambda_bs))


def thresholds(config: NetworkConfig) -> Tuple[float, float]:
    """(theta_b, theta_u): the UL threshold at the BS and the DL threshold at the UE."""
    return config.thresholds()


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return -math.inf if value == 0 else 10.0 * math.log10(value)


def dbm_to_watts(value_dbm: float) -> float:
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def watts_to_dbm(value_w: float) -> float:
    return 10.0 * math.log10(value_w) + 30.0
