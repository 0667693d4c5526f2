"""Command-line commands. Each module defines one click command registered in app.py."""

import json

import click

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NONCONVERGENCE = 2
EXIT_PROPERTY_FAILURE = 3


def report_error(payload):
    """Machine-readable error object on stderr."""
    click.echo(json.dumps(payload, sort_keys=True), err=True)
