import json

import click

from models.run_config import SCHEMA


@click.command('schema')
def schema_command():
    """Print the run-config schema as JSON."""
    click.echo(json.dumps(SCHEMA, indent=2))
