import pytest

from models.equation import EquationSpec
from services.invariants import modified_error_energy, theta_min
from services.norms import h1_norm
from services.property_checks import INVERSE_NODE_COUNTS, PropertyResult, _result, run_checks


def failures(report):
    return [result.format() for _, results in report for result in results if not result.passed]


def test_result_summary():
    assert _result("x", [], 0.0).passed
    result = _result("x", [1e-15, 3e-14], 1e-13)
    assert result == PropertyResult("x", True, 3e-14, 1e-13, 2)
    assert result.format().startswith("PASS  x")


@pytest.mark.parametrize("residuals", [[1e-3, float('nan')], [float('nan'), 1e-3], [float('inf')]])
def test_result_fails_on_non_finite_residual(residuals):
    assert not _result("x", residuals, 1.0).passed


def test_ostrovsky_theta_on_even_node_counts(rng):
    spec = EquationSpec.ostrovsky(alpha=6.0, beta=-1.0, gamma=0.5)
    q, r, L = 2.0, 1.0, 40.0
    theta = theta_min(spec, q, r, L=L)
    for K in INVERSE_NODE_COUNTS:
        dx = L / K
        for _ in range(200):
            e = 2.0 * q * r * rng.uniform(-1.0, 1.0, K)
            h1_squared = h1_norm(e, dx) ** 2
            assert modified_error_energy(spec, e, dx, theta) >= h1_squared * (1.0 - 1e-13)


def test_operator_suite_passes():
    report = run_checks('operators', 20240517)
    assert [name for name, _ in report] == ['operators']
    assert failures(report) == []


def test_bounds_suite_passes():
    assert failures(run_checks('bounds', 20240517)) == []


def test_same_seed_same_report():
    first = [result.to_dict() for _, results in run_checks('operators', 3) for result in results]
    second = [result.to_dict() for _, results in run_checks('operators', 3) for result in results]
    assert first == second


def test_unknown_scope():
    with pytest.raises(ValueError, match="Unknown check scope"):
        run_checks('nothing', 1)


@pytest.mark.slow
def test_invariant_suite_passes():
    assert failures(run_checks('invariants', 20240517)) == []
