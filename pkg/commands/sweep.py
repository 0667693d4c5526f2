import logging

import click

from commands import EXIT_CONFIG, EXIT_NONCONVERGENCE, EXIT_OK, report_error
from commands.run import guard_error_payload
from models.run_config import ConfigError, build_reference, load_run_config
from services.convergence import convergence_study
from services.reference import OracleError
from services.reporting import format_convergence, write_convergence
from services.solver import StepSizeGuardError

logger = logging.getLogger(__name__)


@click.command('sweep')
@click.argument('config_path')
@click.option('--levels', default=4, show_default=True, type=int,
              help='Number of refinement levels; dx and dt are halved per level.')
@click.pass_context
def sweep_command(ctx, config_path, levels):
    """Convergence study: final-time H1 errors and observed orders."""
    if levels < 2:
        report_error({'error': 'usage', 'field': 'levels',
                      'message': f"levels={levels}; a convergence study needs at least 2"})
        ctx.exit(EXIT_CONFIG)
    try:
        run_config = load_run_config(config_path)
        reference = build_reference(run_config)
        table = convergence_study(run_config.spec, reference, run_config.grid, levels, run_config.solver)
    except ConfigError as e:
        report_error(e.to_dict())
        ctx.exit(EXIT_CONFIG)
    except StepSizeGuardError as e:
        report_error(guard_error_payload(e))
        ctx.exit(EXIT_CONFIG)
    except OracleError as e:
        logger.error(str(e))
        report_error({'error': 'oracle', 'message': str(e)})
        ctx.exit(EXIT_NONCONVERGENCE)
    except ValueError as e:
        report_error({'error': 'config', 'field': 'grid', 'message': str(e)})
        ctx.exit(EXIT_CONFIG)

    write_convergence(table, run_config.outputs.convergence_path)
    click.echo(format_convergence(table))

    if not table.all_converged:
        failed = [row.K for row in table.rows if not row.ok]
        report_error({'error': 'nonconvergence', 'levels': failed})
        ctx.exit(EXIT_NONCONVERGENCE)
    ctx.exit(EXIT_OK)
