import logging

import click

from commands import EXIT_CONFIG, EXIT_NONCONVERGENCE, EXIT_OK, report_error
from models.run_config import ConfigError, build_initial_state, load_run_config
from services.reporting import write_diagnostics, write_snapshots
from services.solver import SchemeSolver, StepSizeGuardError

logger = logging.getLogger(__name__)


def guard_error_payload(error):
    return {
        'error': 'guard',
        'field': 'solver.guard',
        'message': str(error),
        'eps1': error.eps1,
        'eps2': error.eps2,
        'dt': error.dt,
    }


@click.command('run')
@click.argument('config_path')
@click.pass_context
def run_command(ctx, config_path):
    """Simulate one configuration and write its diagnostics."""
    try:
        run_config = load_run_config(config_path)
        u0 = build_initial_state(run_config)
    except ConfigError as e:
        logger.error(f"Invalid config {config_path}: {e}")
        report_error(e.to_dict())
        ctx.exit(EXIT_CONFIG)

    solver = SchemeSolver(run_config.spec, run_config.grid, run_config.solver)
    try:
        series = solver.simulate(u0)
    except StepSizeGuardError as e:
        logger.error(str(e))
        report_error(guard_error_payload(e))
        ctx.exit(EXIT_CONFIG)

    outputs = run_config.outputs
    write_diagnostics(series, outputs.diagnostics_path, fmt=outputs.format)
    if outputs.timeseries_path:
        write_snapshots(series, outputs.timeseries_path, stride=outputs.state_stride)

    click.echo(f"steps={len(series.diags)}/{run_config.grid.M} "
               f"mass_drift={series.relative_drift('mass'):.3e} "
               f"energy_drift={series.relative_drift('energy'):.3e} "
               f"max_sup_norm={series.max_sup_norm():.6e}")

    if series.failure is not None:
        report_error({'error': 'nonconvergence', **series.failure.to_dict()})
        ctx.exit(EXIT_NONCONVERGENCE)
    ctx.exit(EXIT_OK)
