#!/usr/bin/env python3
"""
Configuration commands for the fdpower CLI
"""

from pathlib import Path

import click
import yaml

from cli.utils.constants import CONFIG_TEMPLATE
from cli.utils.display import print_info, print_key_value_pairs, print_success
from cli.utils.error_handler import error_handler


@click.group()
def config():
    """Inspect and create run configuration files"""
    pass


@config.command()
@click.option("--yaml", "as_yaml", is_flag=True, help="Print as YAML instead of a table")
@click.pass_context
@error_handler("Show configuration")
def show(ctx, as_yaml: bool):
    """Show the resolved configuration in SI/linear units"""
    run_config = ctx.obj.run_config()
    values = run_config.flat()
    if as_yaml:
        click.echo(yaml.safe_dump(values, default_flow_style=False, sort_keys=True), nl=False)
    else:
        print_key_value_pairs(values, title="Run Configuration")
        print_info(f"Config hash: {run_config.config_hash()}")
        if ctx.obj.config_path:
            print_info(f"Loaded from: {ctx.obj.config_path}")


@config.command()
@click.argument("path", type=click.Path(dir_okay=False), default="fdpower.conf")
@click.option("--force", is_flag=True, help="Overwrite an existing file")
@error_handler("Initialize configuration")
def init(path: str, force: bool):
    """Write a configuration template with the default system parameters"""
    target = Path(path)
    if target.exists() and not force:
        click.echo(f"Configuration file already exists: {target}")
        click.echo("Use --force to overwrite existing configuration.")
        return
    target.write_text(CONFIG_TEMPLATE, encoding="utf-8")
    print_success(f"Configuration file created: {target}")
