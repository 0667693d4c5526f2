import click

from commands import EXIT_CONFIG, EXIT_OK, EXIT_PROPERTY_FAILURE, report_error
from config import Config
from services.property_checks import SCOPES, run_checks


@click.command('check')
@click.argument('scope')
@click.pass_context
def check_command(ctx, scope):
    """Randomized property suites: operators, invariants, bounds or all."""
    if scope not in SCOPES:
        report_error({'error': 'usage', 'field': 'scope',
                      'message': f"unknown scope {scope!r}; expected one of {', '.join(SCOPES)}"})
        ctx.exit(EXIT_CONFIG)

    seed = (ctx.obj or {}).get('seed')
    seed = Config.DVDM_SEED if seed is None else seed
    click.echo(f"seed={seed}")
    failures = 0
    for name, results in run_checks(scope, seed):
        click.echo(f"[{name}]")
        for result in results:
            click.echo(result.format())
            failures += not result.passed
    click.echo(f"{failures} failed")
    ctx.exit(EXIT_PROPERTY_FAILURE if failures else EXIT_OK)
