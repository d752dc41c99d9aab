"""
Display utilities for formatted CLI output
"""

from typing import Any, Dict, Iterable, List, Optional

from rich.console import Console
from rich.table import Table

from models.optimization import OptimizationResult
from models.report import PerformanceReport

# Tables go to stdout, messages to stderr
console = Console()
err_console = Console(stderr=True)


def print_success(message: str, title: Optional[str] = None) -> None:
    """Print success message with green styling"""
    if title:
        err_console.print(f"✅ {title}", style="bold green")
        err_console.print(f"   {message}", style="green")
    else:
        err_console.print(f"✅ {message}", style="green")


def print_error(message: str, title: Optional[str] = None) -> None:
    """Print error message with red styling"""
    if title:
        err_console.print(f"❌ {title}", style="bold red")
        err_console.print(f"   {message}", style="red")
    else:
        err_console.print(f"❌ {message}", style="red")


def print_warning(message: str) -> None:
    err_console.print(f"⚠️  {message}", style="yellow")


def print_info(message: str) -> None:
    err_console.print(f"ℹ️  {message}", style="blue")


def format_number(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def print_table(data: List[Dict[str, Any]], title: Optional[str] = None) -> None:
    """Print data as a formatted table"""
    if not data:
        print_info("No data to display")
        return

    headers = list(data[0].keys())
    table = Table(title=title, show_header=True, header_style="bold cyan")
    for header in headers:
        table.add_column(header, justify="right" if isinstance(data[0][header], (int, float)) else "left")
    for row in data:
        table.add_row(*[format_number(row.get(header, "")) for header in headers])
    console.print(table)


def print_key_value_pairs(data: Dict[str, Any], title: Optional[str] = None) -> None:
    """Print key-value pairs under an underlined title"""
    if title:
        console.print(f"\n{title}", style="bold cyan")
        console.print("=" * len(title), style="bold cyan")
    for key, value in data.items():
        console.print(f"{key:.<24} {format_number(value)}", style="cyan")


def report_rows(labelled: Iterable[tuple]) -> List[Dict[str, Any]]:
    """Table rows for (scheme, engine, report) triples."""
    rows = []
    for scheme, engine, report in labelled:
        rows.append(
            {
                "scheme": scheme,
                "engine": engine,
                "p_ul": report.p_ul,
                "p_dl": report.p_dl,
                "rate_ul (Mbps)": report.rate_ul / 1e6,
                "rate_dl (Mbps)": report.rate_dl / 1e6,
                "ase (bps/Hz/km2)": report.ase * 1e6,
                "ee (Mbit/J)": report.ee / 1e6,
            }
        )
    return rows


def print_reports(labelled: Iterable[tuple], title: str = "Performance") -> None:
    print_table(report_rows(labelled), title=title)


def print_checks(results) -> None:
    rows = [
        {"check": r.name, "gap": r.gap, "tolerance": r.tolerance, "status": "pass" if r.passed else "FAIL"}
        for r in results
    ]
    print_table(rows, title="Validation")


def print_optimization(result: OptimizationResult) -> None:
    values = dict(zip(result.parameter_names, result.best_parameters))
    values.update(
        objective=result.value,
        rate_ul_mbps=result.rate_ul / 1e6,
        rate_dl_mbps=result.rate_dl / 1e6,
        evaluations=len(result.trace),
    )
    print_key_value_pairs(values, title=f"Optimum for {result.family.value}")


def print_ci(report: PerformanceReport) -> None:
    if report.ci_halfwidth:
        print_key_value_pairs(report.ci_halfwidth, title="95% CI half-widths")


def print_command_help(commands: Dict[str, str], title: str = "Available Commands") -> None:
    """Print command help in a formatted table"""
    table = Table(title=title, show_header=True, header_style="bold cyan")
    table.add_column("Command", style="cyan")
    table.add_column("Description", style="white")
    for command, description in commands.items():
        table.add_row(command, description)
    console.print(table)
