"""
Optimize command: parameter search for one power-control scheme
"""

from typing import Optional, Tuple

import click

from cli.utils.config import parse_engines, parse_quantity
from cli.utils.csv_writer import write_csv
from cli.utils.display import print_optimization, print_success
from cli.utils.error_handler import ValidationError, error_handler
from models.optimization import FAMILY_PARAMETERS, Objective, OptimizationProblem, ParameterBox
from models.power import SchemeFamily
from services.optimizer import default_boxes, optimize as run_optimization

PARAMETER_DIMENSIONS = {"p_max": "power", "p_min": "power", "p_bar": "power", "epsilon": "plain", "xi": "plain"}


def parse_traffic(text: str) -> Tuple[float, float]:
    """'2:1' or '2' -> (dl, ul) weights."""
    try:
        if ":" in text:
            dl, ul = (float(part) for part in text.split(":", 1))
        else:
            dl, ul = float(text), 1.0
    except ValueError:
        raise ValidationError(f"Invalid traffic ratio: {text}", hint="Use DL:UL, e.g. 2:1")
    if dl <= 0 or ul <= 0:
        raise ValidationError(f"Traffic weights must be positive, got {text}")
    return dl, ul


def parse_box(text: str) -> ParameterBox:
    """'name=low:high' with units allowed on both ends."""
    try:
        name, bounds = text.split("=", 1)
        low, high = bounds.split(":", 1)
    except ValueError:
        raise ValidationError(f"Invalid box: {text}", hint="Use name=low:high, e.g. p_bar=0.1W:2W")
    name = name.strip()
    if name not in PARAMETER_DIMENSIONS:
        raise ValidationError(f"Unknown parameter in box: {name}")
    dimension = PARAMETER_DIMENSIONS[name]
    return ParameterBox(name=name, low=parse_quantity(name, low, dimension), high=parse_quantity(name, high, dimension))


@click.command()
@click.option("--scheme", "scheme_name", default=None, help="cpc, upc, fpc or apc (default: config)")
@click.option("--objective", type=click.Choice([o.value for o in Objective]), default=Objective.MAX_MIN_RATE.value,
              show_default=True)
@click.option("--engine", default="lower", show_default=True, help="lower, upper, exact or mc")
@click.option("--grid-points", type=int, default=32, show_default=True, help="Grid points per parameter")
@click.option("--tolerance", type=float, default=1e-3, show_default=True, help="Refinement tolerance, fraction of box width")
@click.option("--traffic", default="1:1", show_default=True, help="DL:UL demand ratio for the max-min objective")
@click.option("--box", "boxes", multiple=True, help="Override a search box: name=low:high; repeatable")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None, help="CSV of the search trace")
@click.pass_context
@error_handler("Optimization")
def optimize(ctx, scheme_name, objective, engine, grid_points, tolerance, traffic, boxes, output: Optional[str]):
    """Search the scheme parameters that maximize the objective"""
    run_config = ctx.obj.run_config()
    family = SchemeFamily(scheme_name.lower()) if scheme_name else run_config.scheme
    engine_kind = parse_engines([engine])[0]

    search = {box.name: box for box in default_boxes(family, run_config.network)}
    for text in boxes:
        box = parse_box(text)
        if box.name not in search:
            raise ValidationError(
                f"{family.value} has no parameter {box.name}",
                hint=f"Parameters: {', '.join(FAMILY_PARAMETERS[family])}",
            )
        search[box.name] = box

    problem = OptimizationProblem(
        family=family,
        boxes=tuple(search[name] for name in FAMILY_PARAMETERS[family]),
        objective=Objective(objective),
        engine=engine_kind,
        traffic_weights=parse_traffic(traffic),
        grid_points=grid_points,
        tolerance=tolerance,
    )
    result = run_optimization(problem, run_config.network, run_config.simulation, workers=run_config.simulation.workers)
    print_optimization(result)

    if output:
        header = list(result.parameter_names) + ["value", "rate_ul", "rate_dl", "stage"]
        rows = [list(entry.parameters) + [entry.value, entry.rate_ul, entry.rate_dl, entry.stage] for entry in result.trace]
        write_csv(output, header, rows, run_config.config_hash(), run_config.simulation.seed)
        print_success(f"Wrote {len(rows)} trace rows to {output}")
    ctx.obj.record("optimize", run_config, family=family.value, value=result.value)
