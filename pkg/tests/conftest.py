import json

import numpy as np
import pytest

from models.analysis import ExactSolution
from models.equation import EquationSpec
from models.grid import Grid
from services.reference import sample_exact

# Benchmark soliton: alpha=6, beta=-1, c=1, centred in a period of 40.
BENCH_L = 40.0
BENCH_C = 1.0


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture
def kdv_spec():
    return EquationSpec.kdv(alpha=6.0, beta=-1.0)


@pytest.fixture
def soliton():
    return ExactSolution.soliton(c=BENCH_C, x0=BENCH_L / 2)


@pytest.fixture
def soliton_state(kdv_spec, soliton):
    def sample(grid, t=0.0):
        return sample_exact(soliton, kdv_spec, grid, t)
    return sample


@pytest.fixture
def small_grid():
    return Grid(L=BENCH_L, K=64, T=0.1, M=10)


@pytest.fixture
def write_config(tmp_path):
    """Write a run config into tmp_path, pointing all outputs there too."""
    def write(data, name='config.json'):
        data = json.loads(json.dumps(data))
        outputs = data.setdefault('outputs', {})
        for key in ('diagnostics_path', 'timeseries_path', 'convergence_path'):
            if key in outputs:
                outputs[key] = str(tmp_path / outputs[key])
        outputs.setdefault('diagnostics_path', str(tmp_path / 'diagnostics.csv'))
        outputs.setdefault('convergence_path', str(tmp_path / 'convergence.csv'))
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)
    return write
