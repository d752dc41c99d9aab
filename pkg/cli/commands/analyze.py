"""
Analyze command: one performance report per scheme and engine
"""

from typing import Optional, Tuple

import click

from cli.utils.config import RunConfig, parse_engines, parse_families
from cli.utils.csv_writer import write_csv
from cli.utils.display import print_ci, print_reports
from cli.utils.error_handler import ConvergenceError, error_handler
from models.report import EngineKind, PerformanceReport
from models.power import PowerControlScheme
from services import analytic
from services.errors import QuadratureError
from services.montecarlo import estimate_report

REPORT_HEADER = ("scheme", "engine", "p_ul", "p_dl", "rate_ul", "rate_dl", "ase", "ee", "ci_p_ul", "ci_p_dl")


def evaluate_report(run_config: RunConfig, scheme: PowerControlScheme, engine: EngineKind) -> PerformanceReport:
    if engine is EngineKind.MONTE_CARLO:
        return estimate_report(run_config.network, scheme, run_config.simulation)
    try:
        return analytic.analytic_report(run_config.network, scheme, engine.bound_kind)
    except QuadratureError as e:
        raise ConvergenceError(f"{engine.value} evaluation of {scheme.family.value} failed: {e}")


def report_row(label: str, engine: str, report: PerformanceReport) -> tuple:
    ci = report.ci_halfwidth or {}
    return (
        label, engine, report.p_ul, report.p_dl, report.rate_ul, report.rate_dl,
        report.ase, report.ee, ci.get("p_ul"), ci.get("p_dl"),
    )


@click.command()
@click.option("--scheme", "schemes", multiple=True, help="cpc, upc, fpc, apc or all; repeatable (default: config)")
@click.option("--engine", "engines", multiple=True, help="lower, upper, exact or mc; repeatable (default: lower)")
@click.option("--hd", "include_hd", is_flag=True, help="Add the half-duplex baseline row")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None, help="CSV file ('-' for stdout)")
@click.pass_context
@error_handler("Analysis")
def analyze(ctx: click.Context, schemes: Tuple[str, ...], engines: Tuple[str, ...], include_hd: bool, output: Optional[str]):
    """Coverage, rates, ASE and EE of each scheme under each engine"""
    run_config = ctx.obj.run_config()
    families = parse_families(schemes, run_config.scheme)
    kinds = parse_engines(engines)

    labelled = []
    for family in families:
        scheme = run_config.build_scheme(family)
        for engine in kinds:
            labelled.append((family.value, engine.value, evaluate_report(run_config, scheme, engine)))
    if include_hd:
        labelled.append(("hd", EngineKind.EXACT.value, analytic.hd_report(run_config.network)))

    if output == "-":
        click.echo(_render(run_config, labelled), nl=False)
    else:
        print_reports(labelled)
        for _, engine, report in labelled:
            if engine == EngineKind.MONTE_CARLO.value:
                print_ci(report)
        if output:
            _render(run_config, labelled, output)

    ctx.obj.record("analyze", run_config, schemes=[f.value for f in families], engines=[e.value for e in kinds])


def _render(run_config: RunConfig, labelled, path: Optional[str] = None) -> str:
    rows = [report_row(*item) for item in labelled]
    return write_csv(path, REPORT_HEADER, rows, run_config.config_hash(), run_config.simulation.seed)
