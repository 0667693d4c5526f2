"""Result files: per-step diagnostics, state snapshots and convergence tables.

CSV files use the csv module with LF line endings and ``repr`` floats, so the
output is locale-independent and round-trips exactly.
"""

import csv
import json
import logging
import math
import os

logger = logging.getLogger(__name__)

DIAGNOSTIC_COLUMNS = ['step', 'time', 'mass', 'energy', 'l2', 'sup_norm',
                      'iterations', 'contraction_estimate', 'update_norm']
CONVERGENCE_COLUMNS = ['dx', 'dt', 'h1_error', 'order_estimate']


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return str(value)


def diagnostic_rows(series):
    rows = []
    for index, diag in enumerate(series.diags):
        step = index + 1
        rows.append({
            'step': step,
            'time': step * series.grid.dt,
            'mass': diag.mass,
            'energy': diag.energy,
            'l2': diag.l2,
            'sup_norm': diag.sup_norm,
            'iterations': diag.iterations,
            'contraction_estimate': diag.contraction_estimate,
            'update_norm': diag.final_update_norm,
        })
    return rows


def _write_csv(path, columns, rows):
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[column]) for column in columns])


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_diagnostics(series, path, fmt='csv'):
    rows = diagnostic_rows(series)
    if fmt == 'json':
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            json.dump([{key: _json_safe(value) for key, value in row.items()} for row in rows], f, indent=1)
            f.write('\n')
    else:
        _write_csv(path, DIAGNOSTIC_COLUMNS, rows)
    logger.info(f"Wrote {len(rows)} diagnostic rows to {path}")


def write_snapshots(series, path, stride=1):
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(series.to_dict(stride=stride), f)
        f.write('\n')
    logger.info(f"Wrote state snapshots (stride {stride}) to {path}")


def levels_path(path):
    """Sidecar of a convergence CSV holding the per-level K, M, sup norm and failure marker."""
    return os.path.splitext(path)[0] + '_levels.json'


def write_convergence(table, path):
    _write_csv(path, CONVERGENCE_COLUMNS, [row.to_dict() for row in table.rows])
    sidecar = levels_path(path)
    record = {
        'rows': [{key: _json_safe(value) for key, value in row.to_dict().items()} for row in table.rows],
        'all_converged': table.all_converged,
        'fitted_order': _json_safe(table.fitted_order()),
    }
    with open(sidecar, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(record, f, indent=1)
        f.write('\n')
    logger.info(f"Wrote convergence table to {path} and level details to {sidecar}")


def format_convergence(table):
    """EOC table of the levels with a usable error, then one line per failed level."""
    recorder = table.eoc_recorder()
    if len(recorder.history) >= 2:
        lines = [recorder.pretty_print(abscissa_label='dx', error_label='h1_error')]
    else:
        lines = ["h1_error: fewer than two levels with a positive error, no order estimate"]
    for row in table.rows:
        if not row.ok:
            lines.append(f"K={row.K} M={row.M} FAILED: {row.error}")
    return '\n'.join(lines)
