"""
Validate command: self-consistency suites
"""

import click

from cli.utils.display import print_checks, print_success
from cli.utils.error_handler import ValidationSuiteFailure, error_handler
from services.validation import run_suites


@click.command()
@click.option("--quick", is_flag=True, help="Fewer grid points and Monte-Carlo trials")
@click.pass_context
@error_handler("Validation")
def validate(ctx, quick: bool):
    """Run the sandwich, monotonicity, reduction, closed-form and Monte-Carlo checks"""
    run_config = ctx.obj.run_config()
    results = run_suites(run_config.network, quick=quick)
    print_checks(results)

    failed = [r.name for r in results if not r.passed]
    ctx.obj.record("validate", run_config, checks=len(results), failed=failed)
    if failed:
        raise ValidationSuiteFailure(
            f"{len(failed)} of {len(results)} checks failed: {', '.join(failed)}",
            hint="Rerun with --debug to see the gaps as they are computed",
        )
    print_success(f"All {len(results)} checks passed")
