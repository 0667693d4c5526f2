#!/usr/bin/env python3
"""
Energy-conservative KdV-family solver
Command-line entry point: simulations, convergence sweeps and property audits
"""

import logging
import sys

import click

from config import Config


def setup_logging(quiet=False):
    """Setup logging configuration. Logs go to stderr; stdout carries reports only."""
    log_level = 'WARNING' if quiet else Config.LOG_LEVEL
    handlers = [logging.StreamHandler(sys.stderr)]
    if Config.LOG_FILE:
        handlers.append(logging.FileHandler(Config.LOG_FILE, encoding='utf-8'))
    logging.basicConfig(
        level=getattr(logging, log_level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


@click.group()
@click.option('--seed', type=click.IntRange(0, 2 ** 64 - 1), default=None,
              help=f'Seed for the randomized checks (default {Config.DVDM_SEED}).')
@click.option('--quiet', is_flag=True, help='Only log warnings and errors.')
@click.pass_context
def cli(ctx, seed, quiet):
    """Conservative finite-difference solver for KdV, generalized KdV and Ostrovsky equations."""
    setup_logging(quiet)
    ctx.ensure_object(dict)
    ctx.obj['seed'] = seed
    ctx.obj['quiet'] = quiet


def register_commands(group):
    from commands.check import check_command
    from commands.run import run_command
    from commands.schema import schema_command
    from commands.sweep import sweep_command

    group.add_command(run_command)
    group.add_command(sweep_command)
    group.add_command(check_command)
    group.add_command(schema_command)


register_commands(cli)


def main(argv=None):
    """Main entry point. Usage errors exit with 1, like config errors."""
    try:
        code = cli.main(args=argv, prog_name='dvdm', standalone_mode=False)
    except click.UsageError as e:
        e.show()
        sys.exit(1)
    except click.Abort:
        click.echo("Aborted.", err=True)
        sys.exit(1)
    sys.exit(code or 0)


if __name__ == '__main__':
    main()
