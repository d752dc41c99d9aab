#!/usr/bin/env python3
"""
fdpower CLI - coverage, rate, ASE and EE of full-duplex cellular networks
"""

import sys
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import click

from cli.commands.analyze import analyze
from cli.commands.config import config
from cli.commands.experiment import experiment
from cli.commands.optimize import optimize
from cli.commands.sweep import sweep
from cli.commands.validate import validate
from cli.utils.config import RunConfig, load_run_config, parse_overrides
from cli.utils.constants import CLI_APP_NAME, CLI_VERSION, COMMAND_DESCRIPTIONS, WELCOME_MESSAGE
from cli.utils.error_handler import handle_exception
from config.settings import settings
from extensions import configure_logging, run_logger


@dataclass
class CLIContext:
    """CLI context for sharing configuration across commands"""
    config_path: Optional[str] = None
    overrides: Dict[str, str] = field(default_factory=dict)
    verbose: bool = False
    debug: bool = False
    _run_config: Optional[RunConfig] = None

    def run_config(self) -> RunConfig:
        """Resolved run configuration; loaded on first use so errors surface inside the command."""
        if self._run_config is None:
            self._run_config = load_run_config(self.config_path, self.overrides)
        return self._run_config

    def record(self, command: str, run_config: RunConfig, **fields) -> None:
        run_logger.info("command_done", command=command, config_hash=run_config.config_hash(), **fields)


def _log_level(verbose: bool, debug: bool, log_level: Optional[str]) -> str:
    if debug:
        return "DEBUG"
    if verbose:
        return "INFO"
    return log_level or settings.log_level


@click.group(invoke_without_command=True)
@click.version_option(version=CLI_VERSION, prog_name=CLI_APP_NAME)
@click.option("--config", "-c", "config_path", type=click.Path(dir_okay=False), default=None,
              help="Run configuration file (key = value lines, or YAML)")
@click.option("--set", "-s", "assignments", multiple=True, metavar="KEY=VALUE",
              help="Override one configuration key; repeatable")
@click.option("--seed", type=int, default=None, help="Monte-Carlo seed")
@click.option("--trials", type=int, default=None, help="Monte-Carlo trials")
@click.option("--workers", type=int, default=None, help="Monte-Carlo worker threads")
@click.option("--verbose", "-v", is_flag=True, help="Log progress at INFO level")
@click.option("--debug", is_flag=True, help="Log at DEBUG level and show tracebacks")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              default=None, help="Explicit log level")
@click.option("--json-logs/--console-logs", default=settings.log_json, help="Log format on stderr")
@click.pass_context
def cli(
    ctx: click.Context,
    config_path: Optional[str],
    assignments: Tuple[str, ...],
    seed: Optional[int],
    trials: Optional[int],
    workers: Optional[int],
    verbose: bool,
    debug: bool,
    log_level: Optional[str],
    json_logs: bool,
):
    """fdpower - full-duplex cellular network analysis under downlink power control"""
    configure_logging(_log_level(verbose, debug, log_level), json_logs)

    try:
        overrides = parse_overrides(assignments)
    except Exception as e:
        sys.exit(handle_exception(e, debug=debug, context="Command line"))
    for key, value in (("seed", seed), ("n_trials", trials), ("workers", workers)):
        if value is not None:
            overrides[key] = value

    ctx.obj = CLIContext(config_path=config_path, overrides=overrides, verbose=verbose, debug=debug)

    if ctx.invoked_subcommand is None:
        display_welcome_message()


cli.add_command(analyze)
cli.add_command(sweep)
cli.add_command(optimize)
cli.add_command(validate)
cli.add_command(config)
cli.add_command(experiment)


def display_welcome_message():
    """Display welcome message when CLI is run without arguments"""
    from cli.utils.display import print_command_help

    click.echo(f"{CLI_APP_NAME} v{CLI_VERSION}")
    click.echo(WELCOME_MESSAGE)
    click.echo()
    print_command_help(COMMAND_DESCRIPTIONS)
    click.echo()
    click.echo(f"Use '{CLI_APP_NAME} <command> --help' for the options of a command.")


def main() -> None:
    """Console entry point; click usage errors exit with 1 like every other configuration error."""
    try:
        cli.main(standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(1)
    except click.exceptions.Exit as e:
        sys.exit(e.exit_code)
    except click.ClickException as e:
        sys.exit(handle_exception(e))


if __name__ == "__main__":
    main()
