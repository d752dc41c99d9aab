"""Derived experiments built on the engines: bound tightness, P_max sweeps, traffic tradeoffs."""

from typing import Dict, Iterable, List, Optional, Sequence

import structlog
from pydantic import BaseModel, ConfigDict

from models.network import NetworkConfig
from models.optimization import Objective, OptimizationProblem, OptimizationResult
from models.power import PowerControlScheme, SchemeFamily
from models.report import BoundKind, EngineKind, LaplaceQuery
from models.simulation import SimulationSpec
from services import analytic
from services.montecarlo import empirical_laplace_curve
from services.network import active_density
from services.optimizer import default_boxes, optimize
from services.power_control import scheme_from_parameters

logger = structlog.get_logger(__name__)


class TightnessRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    s: float
    lower: float
    exact: float
    upper: float
    monte_carlo: Optional[float] = None
    ci_halfwidth: Optional[float] = None


class OperatingPoint(BaseModel):
    """Metrics of one scheme at max-min-calibrated parameters."""

    model_config = ConfigDict(frozen=True)

    family: SchemeFamily
    parameters: Dict[str, float]
    x: float  # swept quantity: P_max (W) or DL:UL ratio
    ase: float
    ase_dl: float
    ase_ul: float
    ee: float
    ee_dl: float
    ee_ul: float

    @property
    def ase_split(self) -> float:
        return self.ase_dl / self.ase_ul if self.ase_ul > 0 else float("inf")

    @property
    def ee_split(self) -> float:
        return self.ee_dl / self.ee_ul if self.ee_ul > 0 else float("inf")


def bound_tightness(
    config: NetworkConfig,
    scheme: PowerControlScheme,
    s_grid: Iterable[float],
    spec: Optional[SimulationSpec] = None,
) -> List[TightnessRow]:
    """Lower bound, exact value and upper bound of the Laplace transform over s; MC columns when `spec` is given."""
    s_grid = list(s_grid)
    estimates = empirical_laplace_curve(s_grid, config, scheme, spec) if spec is not None else [None] * len(s_grid)
    rows = []
    for s, estimate in zip(s_grid, estimates):
        query = LaplaceQuery(s=s, config=config, scheme=scheme)
        row = {"s": s, **{kind.value: analytic.evaluate_laplace(query, kind) for kind in BoundKind}}
        if estimate is not None:
            row.update(monte_carlo=estimate.mean, ci_halfwidth=estimate.ci_halfwidth_95)
        rows.append(TightnessRow(**row))
    return rows


def _split_metrics(config: NetworkConfig, result: OptimizationResult, kind: BoundKind, x: float) -> OperatingPoint:
    scheme = scheme_from_parameters(result.family, result.best_parameters, config)
    report = analytic.analytic_report(config, scheme, kind)
    lambda_b = active_density(config).lambda_b
    total_rate = report.rate_ul + report.rate_dl
    # EE splits in proportion to the delivered rate
    ee_share_dl = report.rate_dl / total_rate if total_rate > 0 else 0.0
    return OperatingPoint(
        family=result.family,
        parameters=dict(zip(result.parameter_names, result.best_parameters)),
        x=x,
        ase=report.ase,
        ase_dl=lambda_b * report.rate_dl / config.bandwidth_w,
        ase_ul=lambda_b * report.rate_ul / config.bandwidth_w,
        ee=report.ee,
        ee_dl=report.ee * ee_share_dl,
        ee_ul=report.ee * (1.0 - ee_share_dl),
    )


def calibrate(
    config: NetworkConfig,
    family: SchemeFamily,
    kind: BoundKind = BoundKind.LOWER,
    ratio: float = 1.0,
    grid_points: int = 16,
) -> OptimizationResult:
    """Max-min parameters of one family with DL demand `ratio` times the UL demand."""
    problem = OptimizationProblem(
        family=family,
        boxes=default_boxes(family, config),
        objective=Objective.MAX_MIN_RATE,
        engine=EngineKind.from_bound(kind),
        traffic_weights=(ratio, 1.0),
        grid_points=grid_points,
    )
    return optimize(problem, config)


def peak_power_sweep(
    config: NetworkConfig,
    family: SchemeFamily,
    p_max_grid: Sequence[float],
    kind: BoundKind = BoundKind.LOWER,
    grid_points: int = 16,
) -> List[OperatingPoint]:
    rows = []
    for p_max in p_max_grid:
        swept = config.with_updates(p_max=p_max, p_min=min(config.p_min, p_max))
        result = calibrate(swept, family, kind, grid_points=grid_points)
        rows.append(_split_metrics(swept, result, kind, p_max))
        logger.debug("peak_power_point", family=family.value, p_max=p_max, ase=rows[-1].ase)
    return rows


def tradeoff_trace(
    config: NetworkConfig,
    family: SchemeFamily,
    ratios: Sequence[float],
    kind: BoundKind = BoundKind.LOWER,
    grid_points: int = 16,
) -> List[OperatingPoint]:
    """ASE and EE with their DL/UL splits as the DL share of the demand grows."""
    return [
        _split_metrics(config, calibrate(config, family, kind, ratio, grid_points), kind, ratio) for ratio in ratios
    ]


def traffic_operating_point(
    config: NetworkConfig,
    families: Sequence[SchemeFamily] = (SchemeFamily.UPC, SchemeFamily.APC, SchemeFamily.FPC),
    ratio: float = 2.0,
    kind: BoundKind = BoundKind.LOWER,
    grid_points: int = 16,
) -> Dict[SchemeFamily, OperatingPoint]:
    return {
        family: _split_metrics(config, calibrate(config, family, kind, ratio, grid_points), kind, ratio)
        for family in families
    }
