"""
Experiment commands: CSV data behind the bound-tightness, peak-power, tradeoff and SI studies
"""

from typing import Optional

import click
import numpy as np

from cli.utils.config import parse_engines, parse_families, parse_quantity
from cli.utils.csv_writer import write_csv
from cli.utils.display import print_success, print_table
from cli.utils.error_handler import ValidationError, error_handler
from models.report import EngineKind
from services import experiments
from services.network import linear_to_db
from services.optimizer import si_requirement

OPERATING_HEADER = ("family", "x", "parameters", "ase", "ase_dl", "ase_ul", "ase_split", "ee", "ee_dl", "ee_ul", "ee_split")


def _emit(ctx, output: Optional[str], header, rows, name: str) -> None:
    run_config = ctx.obj.run_config()
    text = write_csv(output, header, rows, run_config.config_hash(), run_config.simulation.seed)
    if output in (None, "-"):
        click.echo(text, nl=False)
    else:
        print_success(f"Wrote {len(rows)} rows to {output}")
    ctx.obj.record(f"experiment {name}", run_config, rows=len(rows))


def _bound_kind(engine: str):
    kind = parse_engines([engine])[0]
    if kind is EngineKind.MONTE_CARLO:
        raise ValidationError("this experiment calibrates parameters analytically", hint="Use lower, upper or exact")
    return kind.bound_kind


def _operating_rows(points):
    return [
        (
            p.family.value, p.x, ";".join(f"{k}={v:.6g}" for k, v in p.parameters.items()),
            p.ase, p.ase_dl, p.ase_ul, p.ase_split, p.ee, p.ee_dl, p.ee_ul, p.ee_split,
        )
        for p in points
    ]


@click.group()
def experiment():
    """Derived studies written as CSV"""
    pass


output_option = click.option("--output", "-o", type=click.Path(dir_okay=False), default="-", show_default=True,
                             help="CSV file ('-' for stdout)")


@experiment.command()
@click.option("--scheme", "schemes", multiple=True, help="cpc, upc, fpc, apc or all; repeatable")
@click.option("--s-min", default=1e8, show_default=True, type=float)
@click.option("--s-max", default=1e12, show_default=True, type=float)
@click.option("--points", default=20, show_default=True, type=int)
@click.option("--mc", "with_mc", is_flag=True, help="Add Monte-Carlo columns")
@output_option
@click.pass_context
@error_handler("Bound tightness")
def tightness(ctx, schemes, s_min, s_max, points, with_mc, output):
    """Lower bound, exact value and upper bound of the interference Laplace transform"""
    run_config = ctx.obj.run_config()
    spec = run_config.simulation if with_mc else None
    rows = []
    for family in parse_families(schemes, run_config.scheme):
        scheme = run_config.build_scheme(family)
        for row in experiments.bound_tightness(run_config.network, scheme, np.geomspace(s_min, s_max, points), spec):
            rows.append((family.value, row.s, row.lower, row.exact, row.upper, row.monte_carlo, row.ci_halfwidth))
    _emit(ctx, output, ("family", "s", "lower", "exact", "upper", "monte_carlo", "ci_halfwidth"), rows, "tightness")


@experiment.command("peak-power")
@click.option("--scheme", "schemes", multiple=True, help="cpc, upc, fpc, apc or all; repeatable")
@click.option("--min", "low", default="23 dBm", show_default=True)
@click.option("--max", "high", default="43 dBm", show_default=True)
@click.option("--points", default=6, show_default=True, type=int)
@click.option("--engine", default="lower", show_default=True)
@click.option("--grid-points", default=16, show_default=True, type=int)
@output_option
@click.pass_context
@error_handler("Peak-power sweep")
def peak_power(ctx, schemes, low, high, points, engine, grid_points, output):
    """ASE and EE against the BS peak power, with max-min parameters at each point"""
    run_config = ctx.obj.run_config()
    grid = np.geomspace(parse_quantity("p_max", low, "power"), parse_quantity("p_max", high, "power"), points)
    kind = _bound_kind(engine)
    rows = []
    for family in parse_families(schemes, run_config.scheme):
        rows.extend(_operating_rows(experiments.peak_power_sweep(run_config.network, family, grid, kind, grid_points)))
    _emit(ctx, output, OPERATING_HEADER, rows, "peak-power")


@experiment.command()
@click.option("--scheme", "schemes", multiple=True, help="cpc, upc, fpc, apc or all; repeatable")
@click.option("--ratio", "ratios", multiple=True, type=float, help="DL:UL demand ratio; repeatable")
@click.option("--engine", default="lower", show_default=True)
@click.option("--grid-points", default=16, show_default=True, type=int)
@output_option
@click.pass_context
@error_handler("Tradeoff trace")
def tradeoff(ctx, schemes, ratios, engine, grid_points, output):
    """ASE/EE and their DL/UL splits as the DL demand share grows"""
    run_config = ctx.obj.run_config()
    ratios = ratios or (0.5, 1.0, 2.0, 4.0)
    kind = _bound_kind(engine)
    rows = []
    for family in parse_families(schemes, run_config.scheme):
        rows.extend(_operating_rows(experiments.tradeoff_trace(run_config.network, family, ratios, kind, grid_points)))
    _emit(ctx, output, OPERATING_HEADER, rows, "tradeoff")


@experiment.command("operating-point")
@click.option("--ratio", default=2.0, show_default=True, type=float, help="DL:UL demand ratio")
@click.option("--engine", default="lower", show_default=True)
@click.option("--grid-points", default=16, show_default=True, type=int)
@output_option
@click.pass_context
@error_handler("Operating point")
def operating_point(ctx, ratio, engine, grid_points, output):
    """ASE and EE of UPC, APC and FPC at one DL:UL demand ratio"""
    run_config = ctx.obj.run_config()
    points = experiments.traffic_operating_point(run_config.network, ratio=ratio, kind=_bound_kind(engine),
                                                 grid_points=grid_points)
    _emit(ctx, output, OPERATING_HEADER, _operating_rows(points.values()), "operating-point")


@experiment.command("si-requirement")
@click.option("--scheme", "schemes", multiple=True, help="cpc, upc, fpc, apc or all; repeatable")
@click.option("--target", "targets", multiple=True, required=True, help="Cell-edge distance, units allowed; repeatable")
@click.option("--engine", default="lower", show_default=True)
@click.pass_context
@error_handler("SI requirement")
def si_requirement_command(ctx, schemes, targets, engine):
    """Largest residual SI ratio that keeps FD ahead of HD out to the target distance"""
    run_config = ctx.obj.run_config()
    kind = _bound_kind(engine)
    rows = []
    for family in parse_families(schemes, run_config.scheme):
        scheme = run_config.build_scheme(family)
        for target in targets:
            distance = parse_quantity("target", target, "distance")
            result = si_requirement(scheme, distance, run_config.network, kind)
            if not result.feasible:
                beta = "infeasible"
            elif result.unbounded:
                beta = "any"
            else:
                beta = f"{linear_to_db(result.beta):.1f} dB"
            rows.append({"scheme": family.value, "target (m)": distance, "beta": beta,
                         "crossover (m)": result.crossover_at_beta if result.crossover_at_beta is not None else ""})
    print_table(rows, title="SI cancellation requirement")
    ctx.obj.record("experiment si-requirement", run_config, rows=len(rows))
