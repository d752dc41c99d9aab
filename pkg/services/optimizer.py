"""Parameter search for the power-control schemes plus the FD/HD crossover drivers."""

import math
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Callable, List, Optional, Tuple

import numpy as np
import structlog
from scipy import optimize as sp_optimize

from models.network import NetworkConfig
from models.optimization import (
    FAMILY_PARAMETERS,
    Objective,
    OptimizationProblem,
    OptimizationResult,
    ParameterBox,
    SIRequirement,
    TraceEntry,
)
from models.power import PowerControlScheme, SchemeFamily
from models.report import BoundKind, DuplexMode, EngineKind
from models.simulation import SimulationSpec
from services import analytic
from services.errors import DomainError, OptimizationError, QuadratureError
from services.montecarlo import estimate_report
from services.power_control import scheme_from_parameters

logger = structlog.get_logger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

CROSSOVER_RANGE = (1.0, 5000.0)
BETA_DB_RANGE = (-200.0, 0.0)


def golden_section_max(
    fn: Callable[[float], float], lo: float, hi: float, tol: float
) -> Tuple[float, float]:
    """Maximize a unimodal fn on [lo, hi] until the bracket is narrower than tol.

    Returns the best point seen, the bracket ends included.
    """
    if hi < lo:
        raise DomainError(f"empty interval [{lo}, {hi}]")
    if hi - lo <= tol:
        x = 0.5 * (lo + hi)
        return x, fn(x)

    seen = {lo: fn(lo), hi: fn(hi)}
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    seen[c], seen[d] = fc, fd
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fn(c)
            seen[c] = fc
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fn(d)
            seen[d] = fd
    # ties go to the smaller argument
    best = max(sorted(seen), key=lambda x: seen[x])
    return best, seen[best]


class _Evaluator:
    """Objective value of a parameter point, with every evaluation recorded."""

    def __init__(
        self,
        problem: OptimizationProblem,
        config: NetworkConfig,
        spec: Optional[SimulationSpec] = None,
    ):
        self.problem = problem
        self.config = config
        self.spec = spec or SimulationSpec()
        self.trace: List[TraceEntry] = []
        self._cache = {}

    def rates_and_value(self, point: Tuple[float, ...]) -> Tuple[float, float, float]:
        if point in self._cache:
            return self._cache[point]
        problem = self.problem
        if problem.family is SchemeFamily.UPC and point[0] >= point[1]:
            result = (-math.inf, 0.0, 0.0)
            self._cache[point] = result
            return result
        try:
            scheme = scheme_from_parameters(problem.family, point, self.config)
            result = self._evaluate(scheme)
        except QuadratureError as exc:
            raise OptimizationError(f"objective failed at {dict(zip(FAMILY_PARAMETERS[problem.family], point))}: {exc}", point) from exc
        self._cache[point] = result
        return result

    def _evaluate(self, scheme: PowerControlScheme) -> Tuple[float, float, float]:
        problem = self.problem
        if problem.engine is EngineKind.MONTE_CARLO:
            report = estimate_report(self.config, scheme, self.spec)
        else:
            report = analytic.analytic_report(self.config, scheme, problem.engine.bound_kind)
        if problem.objective is Objective.MAX_MIN_RATE:
            w_dl, w_ul = problem.traffic_weights
            value = min(report.rate_dl / w_dl, report.rate_ul / w_ul)
        elif problem.objective is Objective.MAX_ASE:
            value = report.ase
        else:
            value = report.ee
        return value, report.rate_ul, report.rate_dl

    def record(self, point: Tuple[float, ...], stage: str) -> float:
        value, rate_ul, rate_dl = self.rates_and_value(point)
        self.trace.append(TraceEntry(parameters=point, value=value, rate_ul=rate_ul, rate_dl=rate_dl, stage=stage))
        return value


def _axis(box: ParameterBox, points: int) -> np.ndarray:
    if box.width == 0 or points == 1:
        return np.array([box.low if box.width == 0 else 0.5 * (box.low + box.high)])
    return np.linspace(box.low, box.high, points)


def _better(candidate: Tuple[float, Tuple[float, ...]], incumbent: Tuple[float, Tuple[float, ...]]) -> bool:
    value, point = candidate
    best_value, best_point = incumbent
    if value > best_value:
        return True
    return value == best_value and point < best_point


def optimize(
    problem: OptimizationProblem,
    config: NetworkConfig,
    spec: Optional[SimulationSpec] = None,
    workers: int = 1,
) -> OptimizationResult:
    """Grid search, then coordinate-wise golden-section refinement around the best grid cell.

    Grid points may be evaluated by a thread pool; the reduction walks them in
    grid order, so the result and trace do not depend on `workers`.
    """
    evaluator = _Evaluator(problem, config, spec)
    boxes = problem.boxes
    axes = [_axis(box, problem.grid_points) for box in boxes]
    grid = [tuple(float(x) for x in point) for point in product(*axes)]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(evaluator.rates_and_value, grid))
    values = [evaluator.record(point, "grid") for point in grid]

    best = (values[0], grid[0])
    for value, point in zip(values[1:], grid[1:]):
        if _better((value, point), best):
            best = (value, point)
    if not math.isfinite(best[0]):
        raise OptimizationError(f"no feasible point in the {problem.family.value} box", best[1])

    current = list(best[1])
    for dim, (box, axis) in enumerate(zip(boxes, axes)):
        if axis.size < 2:
            continue
        step = axis[1] - axis[0]
        lo = max(box.low, current[dim] - step)
        hi = min(box.high, current[dim] + step)

        def slice_value(x: float, dim=dim) -> float:
            point = list(current)
            point[dim] = x
            return evaluator.record(tuple(point), "refine")

        x, value = golden_section_max(slice_value, lo, hi, problem.tolerance * box.width)
        x = min(max(x, box.low), box.high)
        candidate = tuple(current[:dim] + [x] + current[dim + 1:])
        if _better((value, candidate), best):
            best = (value, candidate)
            current = list(candidate)

    value, rate_ul, rate_dl = evaluator.rates_and_value(best[1])
    logger.info(
        "optimize_done",
        family=problem.family.value,
        objective=problem.objective.value,
        parameters=best[1],
        value=value,
        evaluations=len(evaluator.trace),
    )
    return OptimizationResult(
        family=problem.family,
        parameter_names=FAMILY_PARAMETERS[problem.family],
        best_parameters=best[1],
        value=value,
        rate_ul=rate_ul,
        rate_dl=rate_dl,
        trace=evaluator.trace,
    )


def default_boxes(family: SchemeFamily, config: NetworkConfig) -> Tuple[ParameterBox, ...]:
    """Search boxes spanning the whole admissible range of each parameter."""
    p_floor = config.p_max * 1e-3
    if family is SchemeFamily.CPC:
        return (ParameterBox(name="p_max", low=p_floor, high=config.p_max),)
    if family is SchemeFamily.UPC:
        return (
            ParameterBox(name="p_min", low=p_floor, high=config.p_max),
            ParameterBox(name="p_max", low=p_floor, high=config.p_max),
        )
    if family is SchemeFamily.FPC:
        return (
            ParameterBox(name="p_bar", low=p_floor, high=config.p_max),
            ParameterBox(name="epsilon", low=0.0, high=1.0),
        )
    return (
        ParameterBox(name="p_bar", low=p_floor, high=config.p_max),
        ParameterBox(name="xi", low=0.01, high=1.0),
    )


def _rate_gap(r: float, scheme: PowerControlScheme, config: NetworkConfig, kind: BoundKind) -> float:
    fd = analytic.rate_given_distance(r, config, scheme, kind, DuplexMode.FD)
    hd = analytic.rate_given_distance(r, config, scheme, kind, DuplexMode.HD)
    return fd - hd


def crossover_distance(
    scheme: PowerControlScheme, beta: float, config: NetworkConfig, kind: BoundKind = BoundKind.LOWER
) -> float:
    """Link distance beyond which half duplex gives the larger sum rate, to 1 m.

    Returns 0 when HD already wins at the shortest distance and the far end of
    the search range when FD wins everywhere.
    """
    config = config.with_updates(beta=beta)
    lo, hi = CROSSOVER_RANGE
    gap_lo = _rate_gap(lo, scheme, config, kind)
    if gap_lo <= 0:
        return 0.0
    gap_hi = _rate_gap(hi, scheme, config, kind)
    if gap_hi > 0:
        logger.warning("crossover_open_interval", beta=beta, upper=hi)
        return hi
    return float(sp_optimize.bisect(_rate_gap, lo, hi, args=(scheme, config, kind), xtol=1.0))


def si_requirement(
    scheme: PowerControlScheme,
    target_distance: float,
    config: NetworkConfig,
    kind: BoundKind = BoundKind.LOWER,
    tolerance_db: float = 0.1,
) -> SIRequirement:
    """Largest SI ratio beta whose crossover distance still reaches target_distance."""
    if target_distance < 0:
        raise DomainError(f"target distance must be non-negative, got {target_distance}")
    if target_distance == 0:
        return SIRequirement(target_distance=0.0, feasible=True, beta=math.inf)

    def margin(beta_db: float) -> float:
        return crossover_distance(scheme, 10.0 ** (beta_db / 10.0), config, kind) - target_distance

    lo, hi = BETA_DB_RANGE
    if margin(hi) >= 0:
        return SIRequirement(
            target_distance=target_distance,
            feasible=True,
            beta=1.0,
            crossover_at_beta=margin(hi) + target_distance,
        )
    if margin(lo) < 0:
        return SIRequirement(target_distance=target_distance, feasible=False)

    # margin(lo) >= 0 > margin(hi); keep lo feasible
    while hi - lo > tolerance_db:
        mid = 0.5 * (lo + hi)
        if margin(mid) >= 0:
            lo = mid
        else:
            hi = mid
    beta = 10.0 ** (lo / 10.0)
    return SIRequirement(
        target_distance=target_distance,
        feasible=True,
        beta=beta,
        crossover_at_beta=crossover_distance(scheme, beta, config, kind),
    )

