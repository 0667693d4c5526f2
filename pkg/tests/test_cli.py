import csv
import json
import logging

import pytest
from click.testing import CliRunner

from app import cli, main
from services.reporting import DIAGNOSTIC_COLUMNS


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    root = logging.getLogger()
    for handler in root.handlers[:]:
        if type(handler) in (logging.StreamHandler, logging.FileHandler):
            root.removeHandler(handler)
            handler.close()
    root.setLevel(logging.WARNING)


@pytest.fixture
def runner():
    return CliRunner()


def soliton_run(K=64, T=0.1, M=10, **solver):
    data = {
        'equation': {'family': 'KdV', 'alpha': 6.0, 'beta': -1.0},
        'grid': {'L': 40.0, 'K': K, 'T': T, 'M': M},
        'initial': {'soliton': {'c': 1.0, 'x0': 20.0}},
        'outputs': {'diagnostics_path': 'diagnostics.csv', 'timeseries_path': 'states.json',
                    'state_stride': 4},
    }
    if solver:
        data['solver'] = solver
    return data


def read_csv(path):
    with open(path, newline='') as f:
        return list(csv.reader(f))


def test_run_writes_diagnostics(runner, write_config, tmp_path):
    result = runner.invoke(cli, ['--quiet', 'run', write_config(soliton_run(tol=1e-13))])
    assert result.exit_code == 0, result.output
    assert result.output.startswith("steps=10/10 mass_drift=")

    rows = read_csv(tmp_path / 'diagnostics.csv')
    assert rows[0] == DIAGNOSTIC_COLUMNS
    assert len(rows) == 11
    assert [int(row[0]) for row in rows[1:]] == list(range(1, 11))
    assert (tmp_path / 'diagnostics.csv').read_bytes().count(b'\r') == 0

    states = json.loads((tmp_path / 'states.json').read_text())
    assert [snapshot['step'] for snapshot in states['snapshots']] == [0, 4, 8, 10]
    assert states['completed'] is True
    assert len(states['snapshots'][0]['values']) == 64


def test_run_json_diagnostics(runner, write_config, tmp_path):
    data = soliton_run()
    data['outputs'] = {'diagnostics_path': 'diagnostics.json', 'format': 'json'}
    result = runner.invoke(cli, ['--quiet', 'run', write_config(data)])
    assert result.exit_code == 0, result.output
    records = json.loads((tmp_path / 'diagnostics.json').read_text())
    assert len(records) == 10
    assert set(records[0]) == set(DIAGNOSTIC_COLUMNS)


def test_run_rejects_invalid_grid(runner, write_config):
    result = runner.invoke(cli, ['--quiet', 'run', write_config(soliton_run(K=4))])
    assert result.exit_code == 1
    assert '"field": "grid.K"' in result.output


def test_run_enforced_guard(runner, write_config):
    config = write_config(soliton_run(K=100, T=1.0, M=20, method='FixedPoint',
                                      guard={'q': 2.0, 'r': 1.0, 'enforce': True}))
    result = runner.invoke(cli, ['--quiet', 'run', config])
    assert result.exit_code == 1
    payload = json.loads(result.output.strip().splitlines()[-1])
    assert payload['error'] == 'guard'
    assert payload['eps1'] == pytest.approx(0.4 ** 3 / (0.16 * 7 + 4.5))
    assert payload['eps2'] == pytest.approx(0.4 ** 3 / (0.16 * 5 + 1.5))


def test_run_nonconvergence_keeps_partial_output(runner, write_config, tmp_path):
    result = runner.invoke(cli, ['--quiet', 'run', write_config(soliton_run(max_iter=1))])
    assert result.exit_code == 2
    assert '"error": "nonconvergence"' in result.output
    rows = read_csv(tmp_path / 'diagnostics.csv')
    assert rows == [DIAGNOSTIC_COLUMNS]
    states = json.loads((tmp_path / 'states.json').read_text())
    assert states['failure']['step'] == 0


def test_sweep_levels_must_be_two(runner, write_config):
    result = runner.invoke(cli, ['--quiet', 'sweep', write_config(soliton_run()), '--levels', '1'])
    assert result.exit_code == 1
    assert '"field": "levels"' in result.output


def test_small_sweep(runner, write_config, tmp_path):
    data = {
        'equation': {'family': 'KdV', 'alpha': 0.0, 'beta': -1.0},
        'grid': {'L': 6.283185307179586, 'K': 32, 'T': 0.5, 'M': 16},
        'initial': {'fourier': {'modes': 3, 'amplitude': 0.5, 'seed': 4}},
        'solver': {'tol': 1e-13},
    }
    result = runner.invoke(cli, ['--quiet', 'sweep', write_config(data), '--levels', '2'])
    assert result.exit_code == 0, result.output
    rows = read_csv(tmp_path / 'convergence.csv')
    assert rows[0] == ['dx', 'dt', 'h1_error', 'order_estimate']
    assert len(rows) == 3
    assert rows[1][3] == 'nan'

    levels = json.loads((tmp_path / 'convergence_levels.json').read_text())
    assert [row['K'] for row in levels['rows']] == [32, 64]
    assert levels['all_converged'] is True
    assert levels['rows'][0]['error'] is None
    assert 'h1_error' in result.output.splitlines()[0]


def test_sweep_rejects_coarse_time_step(runner, write_config):
    result = runner.invoke(cli, ['--quiet', 'sweep', write_config(soliton_run(K=400, T=1.0, M=2))])
    assert result.exit_code == 1
    assert "dt <= dx" in result.output


def test_check_unknown_scope(runner):
    result = runner.invoke(cli, ['--quiet', 'check', 'everything'])
    assert result.exit_code == 1
    assert '"field": "scope"' in result.output


def test_check_operators_is_deterministic(runner):
    first = runner.invoke(cli, ['--quiet', '--seed', '7', 'check', 'operators'])
    second = runner.invoke(cli, ['--quiet', '--seed', '7', 'check', 'operators'])
    assert first.exit_code == 0, first.output
    assert first.output == second.output
    lines = first.output.splitlines()
    assert lines[0] == "seed=7"
    assert lines[1] == "[operators]"
    assert lines[-1] == "0 failed"


def test_schema_is_json(runner):
    result = runner.invoke(cli, ['--quiet', 'schema'])
    assert result.exit_code == 0
    schema = json.loads(result.output)
    assert set(schema['required']) == {'equation', 'grid', 'initial'}


def test_main_maps_usage_errors_to_one(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(['--quiet', 'run'])
    assert excinfo.value.code == 1
    with pytest.raises(SystemExit) as excinfo:
        main(['--quiet', 'frobnicate'])
    assert excinfo.value.code == 1
    with pytest.raises(SystemExit) as excinfo:
        main(['--quiet', 'schema'])
    assert excinfo.value.code == 0


@pytest.mark.slow
def test_check_all_passes(runner):
    result = runner.invoke(cli, ['--quiet', 'check', 'all'])
    assert result.exit_code == 0, result.output
    assert result.output.splitlines()[-1] == "0 failed"
