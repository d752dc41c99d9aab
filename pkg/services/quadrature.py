"""Adaptive Gauss-Kronrod integration with semi-infinite range mapping.

Thin layer over QUADPACK (scipy.integrate.quad): tolerances come from a
QuadratureSpec, failures raise QuadratureError instead of warning.
"""

import math
import warnings
from enum import Enum
from typing import Callable

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate

from config.settings import settings
from services.errors import QuadratureError

logger = structlog.get_logger(__name__)


class SemiInfiniteMap(str, Enum):
    RATIONAL = "rational"  # x = c t / (1 - t)
    QUADPACK = "quadpack"  # let QUADPACK transform the infinite range itself


class QuadratureSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default=settings.quad_rel_tol, gt=0)
    abs_tol: float = Field(default=settings.quad_abs_tol, gt=0)
    max_subdivisions: int = Field(default=settings.quad_limit, ge=1)
    semi_infinite: SemiInfiniteMap = SemiInfiniteMap.RATIONAL

    def loosened(self, factor: float) -> "QuadratureSpec":
        return self.model_copy(update={"rel_tol": self.rel_tol * factor, "abs_tol": self.abs_tol * factor})


DEFAULT_SPEC = QuadratureSpec()
TRIPLE_SPEC = QuadratureSpec(rel_tol=settings.triple_rel_tol, abs_tol=settings.triple_rel_tol * 1e-6)


def integrate_finite(fn: Callable[[float], float], a: float, b: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    if b <= a:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, error = integrate.quad(
                fn, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions
            )
        except integrate.IntegrationWarning as exc:
            # rerun quietly to report how far it got
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                value, error = integrate.quad(
                    fn, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions
                )
            requested = max(spec.abs_tol, spec.rel_tol * abs(value))
            if error <= 10 * requested:
                logger.debug("quadrature_marginal", a=a, b=b, error=error, requested=requested)
                return value
            raise QuadratureError(f"quadrature on [{a:g}, {b:g}] did not converge: {exc}", error, requested) from exc
    if not math.isfinite(value):
        raise QuadratureError(f"quadrature on [{a:g}, {b:g}] produced {value}", math.inf, spec.abs_tol)
    return value


def integrate_semi_infinite(
    fn: Callable[[float], float], a: float = 0.0, scale: float = 1.0, spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """Integrate fn over [a, inf); `scale` is where the integrand does most of its work."""
    if spec.semi_infinite is SemiInfiniteMap.QUADPACK:
        return integrate_finite_or_inf(fn, a, spec)

    def mapped(t: float) -> float:
        if t >= 1.0:
            return 0.0
        one_minus = 1.0 - t
        x = a + scale * t / one_minus
        return fn(x) * scale / (one_minus * one_minus)

    return integrate_finite(mapped, 0.0, 1.0, spec)


def integrate_finite_or_inf(fn: Callable[[float], float], a: float, spec: QuadratureSpec) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, error = integrate.quad(fn, a, np.inf, epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions)
    requested = max(spec.abs_tol, spec.rel_tol * abs(value))
    if error > 10 * requested or not math.isfinite(value):
        raise QuadratureError(f"quadrature on [{a:g}, inf) did not converge", error, requested)
    return value


def expect_exponential(fn: Callable[[float], float], spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """E{fn(U)} for U ~ Exp(1)."""
    return integrate_semi_infinite(lambda u: fn(u) * math.exp(-u), 0.0, 1.0, spec)

