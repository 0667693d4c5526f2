"""Run configuration files: the published schema, strict loading and initial data.

A config is JSON (or YAML with the same structure). Unknown keys anywhere are
errors; every error names the dotted path of the offending field.
"""

import json
import logging
import math
import numbers
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

from config import Config
from models.analysis import ExactSolution, OracleReference
from models.equation import EquationFamily, EquationSpec
from models.grid import MIN_NODES, Grid, as_state
from models.solver import Guard, SolverConfig

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
        self.message = message

    def to_dict(self):
        return {'error': 'config', 'field': self.field, 'message': self.message}


def _number(description, **limits):
    return {'type': 'number', 'description': description, **limits}


def _integer(description, **limits):
    return {'type': 'integer', 'description': description, **limits}


INITIAL_KINDS = ['soliton', 'samples', 'file', 'fourier']

# Draft-7 JSON Schema; _check_object enforces the subset used here.
SCHEMA = {
    '$schema': 'http://json-schema.org/draft-07/schema#',
    'type': 'object',
    'properties': {
        'equation': {
            'type': 'object',
            'required': ['family', 'alpha', 'beta'],
            'properties': {
                'family': {'type': 'string', 'enum': [f.value for f in EquationFamily]},
                'alpha': _number("nonlinear coefficient"),
                'beta': _number("dispersive coefficient, nonzero"),
                'p': _integer("nonlinearity degree (GeneralizedKdV)", minimum=1),
                'gamma': _number("rotation coefficient (Ostrovsky)"),
            },
        },
        'grid': {
            'type': 'object',
            'required': ['L', 'K', 'T', 'M'],
            'properties': {
                'L': _number("spatial period", exclusiveMinimum=0),
                'K': _integer("number of spatial nodes", minimum=MIN_NODES),
                'T': _number("final time", exclusiveMinimum=0),
                'M': _integer("number of time steps", minimum=1),
            },
        },
        'initial': {
            'type': 'object',
            'oneOf': [{'required': [kind]} for kind in INITIAL_KINDS],
            'properties': {
                'soliton': {
                    'type': 'object',
                    'required': ['c', 'x0'],
                    'properties': {
                        'c': _number("soliton speed", exclusiveMinimum=0),
                        'x0': _number("initial crest position"),
                    },
                },
                'samples': {'type': 'array', 'items': {'type': 'number'}, 'description': "K node values"},
                'file': {'type': 'string', 'description': "JSON list or {\"values\": [...]}; relative to the config"},
                'fourier': {
                    'type': 'object',
                    'required': ['modes', 'amplitude'],
                    'properties': {
                        'modes': _integer("number of Fourier modes", minimum=1),
                        'amplitude': _number("sup norm of the data", exclusiveMinimum=0),
                        'seed': _integer("random seed", minimum=0, default=0),
                    },
                },
            },
        },
        'solver': {
            'type': 'object',
            'properties': {
                'method': {'type': 'string', 'enum': ['FixedPoint', 'Newton'], 'default': 'Newton'},
                'tol': _number("sup-norm update tolerance", exclusiveMinimum=0, default=Config.DEFAULT_TOL),
                'max_iter': _integer("iteration cap per step", minimum=1, default=Config.DEFAULT_MAX_ITER),
                'extrapolate': {'type': 'boolean', 'default': False},
                'guard': {
                    'type': 'object',
                    'required': ['q', 'r'],
                    'properties': {
                        'q': _number("ball radius factor", exclusiveMinimum=1),
                        'r': _number("a priori sup-norm bound", exclusiveMinimum=0),
                        'enforce': {'type': 'boolean', 'default': False},
                    },
                },
            },
        },
        'outputs': {
            'type': 'object',
            'properties': {
                'timeseries_path': {'type': 'string', 'description': "JSON state snapshots"},
                'diagnostics_path': {'type': 'string', 'default': Config.DEFAULT_DIAGNOSTICS_PATH},
                'convergence_path': {'type': 'string', 'default': Config.DEFAULT_CONVERGENCE_PATH},
                'format': {'type': 'string', 'enum': ['csv', 'json'], 'default': 'csv'},
                'state_stride': _integer("snapshot every N steps", minimum=1, default=1),
            },
        },
        'reference': {
            'type': 'object',
            'properties': {
                'oracle_factor': _integer("oracle K / finest sweep K", minimum=4, default=Config.ORACLE_FACTOR),
            },
        },
    },
    'required': ['equation', 'grid', 'initial'],
}


def _close_objects(schema):
    if schema.get('type') == 'object':
        schema['additionalProperties'] = False
        for item in schema['properties'].values():
            _close_objects(item)


_close_objects(SCHEMA)


@dataclass(frozen=True)
class OutputsConfig:
    timeseries_path: Optional[str] = None
    diagnostics_path: str = Config.DEFAULT_DIAGNOSTICS_PATH
    convergence_path: str = Config.DEFAULT_CONVERGENCE_PATH
    format: str = 'csv'
    state_stride: int = 1


@dataclass(frozen=True)
class RunConfig:
    spec: EquationSpec
    grid: Grid
    initial: dict
    solver: SolverConfig = field(default_factory=SolverConfig)
    outputs: OutputsConfig = field(default_factory=OutputsConfig)
    oracle_factor: int = Config.ORACLE_FACTOR
    base_dir: str = '.'

    @property
    def initial_kind(self):
        return next(iter(self.initial))


def _is_number(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool) and math.isfinite(value)


def _is_integer(value):
    return isinstance(value, numbers.Integral) and not isinstance(value, bool)


def _check_value(value, schema, path):
    kind = schema['type']
    if kind == 'object':
        _check_object(value, schema, path)
        return
    if kind == 'number' and not _is_number(value):
        raise ConfigError(path, f"expected a finite number, got {value!r}")
    if kind == 'integer' and not _is_integer(value):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if kind == 'string' and not isinstance(value, str):
        raise ConfigError(path, f"expected a string, got {value!r}")
    if kind == 'boolean' and not isinstance(value, bool):
        raise ConfigError(path, f"expected true or false, got {value!r}")
    if kind == 'array':
        if not isinstance(value, list):
            raise ConfigError(path, f"expected an array, got {type(value).__name__}")
        for index, item in enumerate(value):
            _check_value(item, schema['items'], f"{path}[{index}]")
    if 'enum' in schema and value not in schema['enum']:
        raise ConfigError(path, f"{value!r} is not one of {', '.join(schema['enum'])}")
    if 'minimum' in schema and value < schema['minimum']:
        raise ConfigError(path, f"{value!r} is below the minimum {schema['minimum']}")
    if 'exclusiveMinimum' in schema and value <= schema['exclusiveMinimum']:
        raise ConfigError(path, f"{value!r} must be greater than {schema['exclusiveMinimum']}")


def _check_object(value, schema, path):
    if not isinstance(value, dict):
        raise ConfigError(path, f"expected an object, got {type(value).__name__}")
    properties = schema['properties']
    for key in value:
        if key not in properties and not schema.get('additionalProperties', True):
            where = f"{path}.{key}" if path else key
            raise ConfigError(where, "unknown key")
    for key in schema.get('required', []):
        if key not in value:
            raise ConfigError(f"{path}.{key}" if path else key, "missing required key")
    if 'oneOf' in schema:
        alternatives = [branch['required'][0] for branch in schema['oneOf']]
        if sum(key in value for key in alternatives) != 1:
            raise ConfigError(path, f"exactly one of {', '.join(alternatives)} is required")
    for key, item in value.items():
        if key in properties:
            _check_value(item, properties[key], f"{path}.{key}" if path else key)


def _with_defaults(section, schema):
    values = dict(section or {})
    for key, item in schema['properties'].items():
        if key not in values and 'default' in item:
            values[key] = item['default']
    return values


def _check_writable(path, where):
    parent = os.path.dirname(os.path.abspath(path))
    if not (os.path.isdir(parent) and os.access(parent, os.W_OK)):
        raise ConfigError(where, f"directory of {path!r} does not exist or is not writable")


def parse_run_config(data, base_dir='.'):
    """Validate a decoded config object and build the typed RunConfig."""
    _check_object(data, SCHEMA, '')
    sections = SCHEMA['properties']

    equation = data['equation']
    try:
        spec = EquationSpec.from_dict(equation)
    except ValueError as e:
        raise ConfigError('equation', str(e))

    grid_data = data['grid']
    try:
        grid = Grid(L=grid_data['L'], K=grid_data['K'], T=grid_data['T'], M=grid_data['M'])
    except ValueError as e:
        raise ConfigError('grid', str(e))

    solver_data = _with_defaults(data.get('solver'), sections['solver'])
    guard = None
    if 'guard' in solver_data:
        guard_data = _with_defaults(solver_data['guard'], sections['solver']['properties']['guard'])
        guard = Guard(q=guard_data['q'], r=guard_data['r'], enforce=guard_data['enforce'])
    try:
        solver = SolverConfig(method=solver_data['method'], tol=float(solver_data['tol']),
                              max_iter=int(solver_data['max_iter']), guard=guard,
                              extrapolate=solver_data['extrapolate'])
    except ValueError as e:
        raise ConfigError('solver', str(e))

    outputs_data = _with_defaults(data.get('outputs'), sections['outputs'])
    outputs = OutputsConfig(**outputs_data)
    for key in ('timeseries_path', 'diagnostics_path', 'convergence_path'):
        if getattr(outputs, key):
            _check_writable(getattr(outputs, key), f"outputs.{key}")

    reference = _with_defaults(data.get('reference'), sections['reference'])

    run_config = RunConfig(
        spec=spec,
        grid=grid,
        initial=dict(data['initial']),
        solver=solver,
        outputs=outputs,
        oracle_factor=reference['oracle_factor'],
        base_dir=base_dir,
    )
    # Fail on bad initial data at load time, not after the run starts.
    build_initial_state(run_config)
    return run_config


def load_run_config(path):
    """Read a JSON (or .yaml/.yml) run config from ``path``."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            if path.endswith(('.yaml', '.yml')):
                data = yaml.safe_load(f)
            else:
                data = json.load(f)
    except OSError as e:
        raise ConfigError('', f"cannot read config {path!r}: {e.strerror or e}")
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError('', f"invalid syntax in {path!r}: {e}")
    logger.debug(f"Loaded run config from {path}")
    return parse_run_config(data, base_dir=os.path.dirname(os.path.abspath(path)))


def _load_samples_file(run_config, relative):
    path = relative if os.path.isabs(relative) else os.path.join(run_config.base_dir, relative)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            content = json.load(f)
    except OSError as e:
        raise ConfigError('initial.file', f"cannot read {path!r}: {e.strerror or e}")
    except json.JSONDecodeError as e:
        raise ConfigError('initial.file', f"invalid JSON in {path!r}: {e}")
    if isinstance(content, dict):
        if set(content) - {'values', 'grid'} or 'values' not in content:
            raise ConfigError('initial.file', "expected a JSON list or an object with 'values'")
        content = content['values']
    return content


def build_initial_state(run_config):
    """u0 on the configured grid."""
    # Imported here: services import models, not the other way round at module load.
    from services.reference import fourier_initial, sample_exact

    grid = run_config.grid
    kind = run_config.initial_kind
    params = run_config.initial[kind]
    if kind == 'soliton':
        exact = ExactSolution.soliton(c=params['c'], x0=params['x0'])
        try:
            exact.validate_for(run_config.spec)
        except ValueError as e:
            raise ConfigError('initial.soliton', str(e))
        return sample_exact(exact, run_config.spec, grid, 0.0)
    if kind == 'fourier':
        try:
            return fourier_initial(grid.K, grid.L, params['modes'], params['amplitude'],
                                   seed=params.get('seed', 0))
        except ValueError as e:
            raise ConfigError('initial.fourier', str(e))
    values = params if kind == 'samples' else _load_samples_file(run_config, params)
    try:
        return as_state(values, grid.K)
    except ValueError as e:
        raise ConfigError(f"initial.{kind}", str(e))


def build_reference(run_config):
    """Convergence reference for a sweep: the closed form for soliton data, else the oracle."""
    from services.reference import fourier_function, fourier_interpolate

    kind = run_config.initial_kind
    params = run_config.initial[kind]
    if kind == 'soliton':
        return ExactSolution.soliton(c=params['c'], x0=params['x0'])
    if kind == 'fourier':
        initial = fourier_function(run_config.grid.L, params['modes'], params['amplitude'],
                                   seed=params.get('seed', 0))
    else:
        # Node values are refined by trigonometric interpolation; x must be a uniform grid.
        base = build_initial_state(run_config)
        initial = lambda x: fourier_interpolate(base, np.asarray(x).shape[0])
    return OracleReference(initial=initial, oracle_factor=run_config.oracle_factor)
