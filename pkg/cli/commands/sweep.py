"""
Sweep command: metrics over one swept parameter, written as CSV
"""

from typing import Dict, List, Optional, Tuple

import click
import numpy as np

from cli.utils.config import RunConfig, parse_engines, parse_families, parse_quantity
from cli.utils.constants import KNOWN_KEYS, METRICS, SWEEP_AXES
from cli.utils.csv_writer import write_csv
from cli.utils.display import print_success
from cli.utils.error_handler import ValidationError, error_handler, validate_choice, validate_positive_int
from models.power import SchemeFamily
from models.report import Direction, DuplexMode, EngineKind, PerformanceReport
from cli.commands.analyze import evaluate_report
from services import analytic
from services.montecarlo import estimate_coverage
from services.optimizer import crossover_distance

REPORT_METRICS = ("p_ul", "p_dl", "rate_ul", "rate_dl", "ase", "ee")
DISTANCE_METRICS = ("fd_rate", "hd_rate")


def axis_values(axis: str, low: str, high: str, points: int, scale: str) -> np.ndarray:
    dimension = "distance" if axis == "link_distance" else KNOWN_KEYS[axis]
    lo = float(parse_quantity(axis, low, dimension))
    hi = float(parse_quantity(axis, high, dimension))
    if points == 1:
        return np.array([lo])
    if scale == "log":
        if lo <= 0 or hi <= 0:
            raise ValidationError(f"log sweep of {axis} needs positive bounds, got {lo:g} and {hi:g}")
        return np.geomspace(lo, hi, points)
    return np.linspace(lo, hi, points)


def _check_combination(axis: str, metrics: List[str], engines: List[EngineKind]) -> None:
    if axis == "link_distance":
        bad = [m for m in metrics if m not in DISTANCE_METRICS]
        if bad:
            raise ValidationError(
                f"metrics {', '.join(bad)} are not defined at a fixed link distance",
                hint="Use fd_rate and hd_rate with the link_distance axis",
            )
    if "crossover" in metrics:
        if axis == "link_distance":
            raise ValidationError("crossover is itself a link distance; sweep beta instead")
        if EngineKind.MONTE_CARLO in engines:
            raise ValidationError("crossover needs an analytic engine", hint="Use lower, upper or exact")


class _Evaluator:
    """Metric values at one sweep point, sharing reports between metrics."""

    def __init__(self, run_config: RunConfig, axis: str, value: float):
        self.axis = axis
        self.value = value
        self.distance = value if axis == "link_distance" else None
        self.run_config = run_config if self.distance is not None else run_config.with_updates(**{axis: value})
        self._reports: Dict[Tuple[SchemeFamily, EngineKind], PerformanceReport] = {}

    def report(self, family: SchemeFamily, engine: EngineKind) -> PerformanceReport:
        key = (family, engine)
        if key not in self._reports:
            self._reports[key] = evaluate_report(self.run_config, self.run_config.build_scheme(family), engine)
        return self._reports[key]

    def metric(self, metric: str, family: SchemeFamily, engine: EngineKind) -> float:
        network = self.run_config.network
        if metric in REPORT_METRICS:
            return getattr(self.report(family, engine), metric)
        if metric == "crossover":
            return crossover_distance(self.run_config.build_scheme(family), network.beta, network, engine.bound_kind)
        mode = DuplexMode.FD if metric == "fd_rate" else DuplexMode.HD
        if self.distance is None:
            if mode is DuplexMode.HD:
                return sum(analytic.hd_rates(network))
            return self.report(family, engine).total_rate
        return self._rate_at_distance(family, engine, mode)

    def _rate_at_distance(self, family: SchemeFamily, engine: EngineKind, mode: DuplexMode) -> float:
        network = self.run_config.network
        scheme = self.run_config.build_scheme(family)
        if engine is not EngineKind.MONTE_CARLO:
            return analytic.rate_given_distance(self.distance, network, scheme, engine.bound_kind, mode)
        spec = self.run_config.simulation
        p_ul = estimate_coverage(Direction.UL, network, scheme, spec, mode, self.distance).mean
        p_dl = estimate_coverage(Direction.DL, network, scheme, spec, mode, self.distance).mean
        if mode is DuplexMode.HD:
            w = network.bandwidth_w
            return 0.5 * w * (np.log2(1 + network.theta_b) * p_ul + np.log2(1 + network.theta_u) * p_dl)
        return network.rate_bs * p_ul + network.rate_ue * p_dl * analytic.dl_delivery_factor(network, scheme)


@click.command()
@click.option("--axis", required=True, help=f"Swept key: {', '.join(SWEEP_AXES)}")
@click.option("--min", "low", required=True, help="First value, units allowed (e.g. '-120 dB')")
@click.option("--max", "high", required=True, help="Last value, units allowed")
@click.option("--points", type=int, default=11, show_default=True, help="Number of sweep points")
@click.option("--scale", type=click.Choice(["linear", "log"]), default="linear", show_default=True)
@click.option("--metric", "metrics", multiple=True, help=f"Repeatable; one of {', '.join(METRICS)} (default: p_ul, p_dl)")
@click.option("--scheme", "schemes", multiple=True, help="cpc, upc, fpc, apc or all; repeatable")
@click.option("--engine", "engines", multiple=True, help="lower, upper, exact or mc; repeatable")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default="-", show_default=True,
              help="CSV file ('-' for stdout)")
@click.pass_context
@error_handler("Sweep")
def sweep(ctx, axis, low, high, points, scale, metrics, schemes, engines, output: Optional[str]):
    """One CSV row per axis value, one column per (metric, scheme, engine)"""
    validate_choice(axis, SWEEP_AXES, "sweep axis")
    validate_positive_int(points, "--points")
    metrics = list(metrics) or ["p_ul", "p_dl"]
    for metric in metrics:
        validate_choice(metric, METRICS, "metric")

    run_config = ctx.obj.run_config()
    families = parse_families(schemes, run_config.scheme)
    kinds = parse_engines(engines)
    _check_combination(axis, metrics, kinds)
    values = axis_values(axis, low, high, points, scale)

    columns = [(m, f, e) for m in metrics for f in families for e in kinds]
    header = [axis] + [f"{m}[{f.value}/{e.value}]" for m, f, e in columns]
    rows = []
    for value in values:
        evaluator = _Evaluator(run_config, axis, float(value))
        rows.append([float(value)] + [float(evaluator.metric(m, f, e)) for m, f, e in columns])

    text = write_csv(output, header, rows, run_config.config_hash(), run_config.simulation.seed)
    if output in (None, "-"):
        click.echo(text, nl=False)
    else:
        print_success(f"Wrote {len(rows)} rows to {output}")
    ctx.obj.record("sweep", run_config, axis=axis, points=len(rows))
