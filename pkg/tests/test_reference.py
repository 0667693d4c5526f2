"""Closed-form soliton and the pseudospectral oracle."""

import logging

import numpy as np
import pytest

from models.analysis import ExactSolution
from models.equation import EquationSpec
from models.grid import Grid
from services.reference import (
    dealias_mask,
    evaluate_exact,
    exact_soliton,
    fourier_function,
    fourier_initial,
    fourier_interpolate,
    linear_symbol,
    sample_exact,
    spectral_reference,
)

logger = logging.getLogger(__name__)


def test_soliton_peak():
    assert exact_soliton(1.0, 0.0, 6.0, -1.0, 0.0, 0.0) == pytest.approx(0.5)
    assert exact_soliton(2.0, 3.0, 3.0, -0.5, 0.0, 3.0) == pytest.approx(2.0)


def test_soliton_translates(rng):
    x = rng.uniform(-10, 10, 20)
    for t in (0.3, 1.0, 2.5):
        np.testing.assert_allclose(exact_soliton(1.5, 0.0, 6.0, -1.0, t, x),
                                   exact_soliton(1.5, 0.0, 6.0, -1.0, 0.0, x - 1.5 * t), rtol=1e-14)


def test_soliton_periodization():
    L = 40.0
    x = np.array([0.0, 5.0, 39.0])
    wrapped = exact_soliton(1.0, 38.0, 6.0, -1.0, 0.0, x, L=L)
    np.testing.assert_allclose(wrapped, exact_soliton(1.0, 38.0, 6.0, -1.0, 0.0, x + L, L=L))
    assert wrapped[0] == pytest.approx(float(exact_soliton(1.0, -2.0, 6.0, -1.0, 0.0, 0.0)))
    assert wrapped[2] == pytest.approx(float(exact_soliton(1.0, 38.0, 6.0, -1.0, 0.0, 39.0)))


@pytest.mark.parametrize("c, alpha, beta", [(0.0, 6.0, -1.0), (-1.0, 6.0, -1.0),
                                            (1.0, 0.0, -1.0), (1.0, 6.0, 1.0)])
def test_soliton_rejects(c, alpha, beta):
    with pytest.raises(ValueError):
        exact_soliton(c, 0.0, alpha, beta, 0.0, 0.0)


@pytest.mark.parametrize("c, alpha, beta", [(1.0, 6.0, -1.0), (0.5, 1.0, -2.0)])
def test_soliton_solves_kdv(c, alpha, beta):
    """u_t + alpha u u_x - beta u_xxx via fourth-order differences in t and x."""
    def u(t, x):
        return exact_soliton(c, 0.0, alpha, beta, t, x)

    h = 1e-2
    t = 0.7
    x = np.linspace(-6.0, 6.0, 25)
    u_t = (-u(t + 2 * h, x) + 8 * u(t + h, x) - 8 * u(t - h, x) + u(t - 2 * h, x)) / (12 * h)
    u_x = (-u(t, x + 2 * h) + 8 * u(t, x + h) - 8 * u(t, x - h) + u(t, x - 2 * h)) / (12 * h)
    u_xxx = (-u(t, x + 3 * h) + 8 * u(t, x + 2 * h) - 13 * u(t, x + h)
             + 13 * u(t, x - h) - 8 * u(t, x - 2 * h) + u(t, x - 3 * h)) / (8 * h ** 3)
    residual = u_t + alpha * u(t, x) * u_x - beta * u_xxx
    assert np.max(np.abs(residual)) < 1e-6


def test_exact_solution_validation():
    soliton = ExactSolution.soliton(c=1.0, x0=0.0)
    soliton.validate_for(EquationSpec.kdv(6.0, -1.0))
    soliton.validate_for(EquationSpec.generalized_kdv(6.0, -1.0, p=2))
    soliton.validate_for(EquationSpec.ostrovsky(6.0, -1.0, gamma=0.0))
    with pytest.raises(ValueError):
        soliton.validate_for(EquationSpec.generalized_kdv(6.0, -1.0, p=3))
    with pytest.raises(ValueError):
        soliton.validate_for(EquationSpec.ostrovsky(6.0, -1.0, gamma=0.5))
    with pytest.raises(ValueError):
        soliton.validate_for(EquationSpec.kdv(6.0, 1.0))
    with pytest.raises(ValueError):
        ExactSolution.soliton(c=0.0, x0=0.0)
    with pytest.raises(ValueError):
        ExactSolution.custom("not callable")


def test_sample_exact_custom_and_soliton(kdv_spec):
    grid = Grid(L=2 * np.pi, K=16, T=1.0, M=1)
    custom = ExactSolution.custom(lambda t, x: np.sin(x - t))
    np.testing.assert_allclose(sample_exact(custom, kdv_spec, grid, 0.5), np.sin(grid.nodes - 0.5))
    constant = ExactSolution.custom(lambda t, x: 2.0)
    np.testing.assert_array_equal(sample_exact(constant, kdv_spec, grid, 0.0), np.full(16, 2.0))
    soliton = ExactSolution.soliton(c=1.0, x0=np.pi)
    assert float(evaluate_exact(soliton, kdv_spec, 0.0, np.pi)) == pytest.approx(0.5)


def test_dealias_and_symbol():
    np.testing.assert_array_equal(dealias_mask(12), [True] * 4 + [False] * 3)
    symbol = linear_symbol(EquationSpec.ostrovsky(6.0, -1.0, gamma=0.5), 16, 2 * np.pi)
    assert symbol[0] == 0.0 and symbol[-1] == 0.0
    assert symbol[1] == pytest.approx(-1.0 * (1j) ** 3 + 0.5 / 1j)


def test_fourier_interpolation_keeps_nodes(rng):
    values = fourier_initial(32, 10.0, modes=5, amplitude=1.0, seed=3)
    fine = fourier_interpolate(values, 128)
    np.testing.assert_allclose(fine[::4], values, atol=1e-13)
    with pytest.raises(ValueError, match="multiple"):
        fourier_interpolate(values, 100)


def test_fourier_data():
    u = fourier_function(40.0, modes=6, amplitude=0.8, seed=7)
    x = np.arange(4096) * (40.0 / 4096)
    assert np.max(np.abs(u(x))) == pytest.approx(0.8)
    assert abs(np.mean(u(x))) < 1e-12
    np.testing.assert_array_equal(fourier_initial(64, 40.0, 6, 0.8, seed=7), u(np.arange(64) * 40.0 / 64))
    with pytest.raises(ValueError):
        fourier_initial(8, 40.0, modes=4, amplitude=1.0)
    with pytest.raises(ValueError):
        fourier_function(40.0, modes=0, amplitude=1.0)


def test_oracle_at_time_zero_is_identity(kdv_spec, soliton_state):
    coarse = Grid(L=40.0, K=64, T=1.0, M=1)
    u0 = soliton_state(coarse)
    out = spectral_reference(kdv_spec, u0, Grid(L=40.0, K=256, T=1.0, M=1), 0.0)
    np.testing.assert_array_equal(out, u0)
    assert out is not u0
    with pytest.raises(ValueError, match="multiple"):
        spectral_reference(kdv_spec, u0, Grid(L=40.0, K=200, T=1.0, M=1), 1.0)


@pytest.mark.parametrize("gamma", [0.0, 0.3])
def test_oracle_linear_phase_rotation(gamma):
    L, K, mode, t = 2 * np.pi, 64, 3, 0.5
    spec = EquationSpec.ostrovsky(0.0, -1.0, gamma=gamma)
    x = np.arange(K) * (L / K)
    u = spectral_reference(spec, np.cos(mode * x), Grid(L=L, K=4 * K, T=t, M=1), t)
    # e^{ikx} rotates by exp((beta (ik)^3 + gamma/(ik)) t)
    frequency = spec.beta * mode ** 3 + gamma / mode
    np.testing.assert_allclose(u, np.cos(mode * x - frequency * t), atol=1e-10)


def test_oracle_tracks_soliton(kdv_spec, soliton, soliton_state):
    coarse = Grid(L=40.0, K=128, T=1.0, M=1)
    u = spectral_reference(kdv_spec, soliton_state(coarse), Grid(L=40.0, K=512, T=1.0, M=1), 1.0)
    error = np.max(np.abs(u - sample_exact(soliton, kdv_spec, coarse, 1.0)))
    logger.info(f"oracle soliton error {error:.3e}")
    assert error < 1e-7


@pytest.mark.slow
def test_oracle_fine_soliton(kdv_spec, soliton, soliton_state):
    coarse = Grid(L=40.0, K=256, T=1.0, M=1)
    u = spectral_reference(kdv_spec, soliton_state(coarse), Grid(L=40.0, K=4096, T=1.0, M=1), 1.0)
    assert np.max(np.abs(u - sample_exact(soliton, kdv_spec, coarse, 1.0))) <= 1e-8
