import math

import numpy as np
import pytest

from models.equation import EquationFamily, EquationSpec
from models.grid import Grid, as_state, make_grid
from services.norms import h1_norm, inner_product, lp_norm, sobolev_constant, sup_norm


def test_make_grid_spacing():
    grid = make_grid(L=40, K=400, T=1, M=1000)
    assert grid.dx == pytest.approx(0.1)
    assert grid.dt == pytest.approx(0.001)

    grid = make_grid(L=1, K=5, T=1, M=1)
    assert grid.dx == pytest.approx(0.2)
    assert grid.dt == 1.0


@pytest.mark.parametrize("kwargs, field", [
    ({'L': 1, 'K': 4, 'T': 1, 'M': 1}, 'K'),
    ({'L': 0, 'K': 8, 'T': 1, 'M': 1}, 'L'),
    ({'L': 1, 'K': 8, 'T': -1, 'M': 1}, 'T'),
    ({'L': 1, 'K': 8, 'T': 1, 'M': 0}, 'M'),
    ({'L': 1, 'K': 8.5, 'T': 1, 'M': 1}, 'K'),
])
def test_make_grid_rejects(kwargs, field):
    with pytest.raises(ValueError, match=field):
        make_grid(**kwargs)


def test_grid_refine_keeps_ratio():
    grid = Grid(L=40, K=200, T=1, M=400)
    fine = grid.refine()
    assert (fine.K, fine.M) == (400, 800)
    assert fine.dt / fine.dx == pytest.approx(grid.dt / grid.dx)
    assert grid.K * grid.dx == pytest.approx(grid.L)


def test_as_state_validation():
    np.testing.assert_array_equal(as_state([1, 2, 3]), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError, match="does not match"):
        as_state([1, 2, 3], K=4)
    with pytest.raises(ValueError, match="non-finite"):
        as_state([1, np.nan, 3])
    with pytest.raises(ValueError, match="one-dimensional"):
        as_state([[1, 2], [3, 4]])


def test_equation_spec_validation():
    assert EquationSpec.kdv(6, -1).family is EquationFamily.KDV
    with pytest.raises(ValueError, match="beta"):
        EquationSpec.kdv(6, 0)
    with pytest.raises(ValueError, match="p="):
        EquationSpec(EquationFamily.KDV, 6, -1, p=3)
    with pytest.raises(ValueError, match="gamma="):
        EquationSpec(EquationFamily.KDV, 6, -1, gamma=0.5)
    with pytest.raises(ValueError, match="Invalid p"):
        EquationSpec.generalized_kdv(1, -1, p=0)
    with pytest.raises(ValueError, match="Unknown equation family"):
        EquationSpec('Burgers', 1, 1)

    spec = EquationSpec.generalized_kdv(3, -1, p=4)
    assert EquationSpec.from_dict(spec.to_dict()) == spec
    assert spec.flux_coefficient == pytest.approx(3 / 20)


def test_lp_norm_examples():
    assert lp_norm([3, 4], 2, 1.0) == pytest.approx(5.0)
    assert lp_norm([1, -2, 3], math.inf, 1.0) == 3.0
    assert lp_norm([1, 1, 1, 1], 1, 0.25) == pytest.approx(1.0)
    assert sup_norm([0.5, -0.75]) == 0.75
    with pytest.raises(ValueError):
        lp_norm([1, 2], 0.5, 1.0)


def test_inner_product_examples():
    assert inner_product([1, 2], [3, 4], 0.5) == pytest.approx(5.5)
    assert inner_product([1, 0], [0, 1], 1.0) == 0.0
    v = [2, 2]
    assert inner_product(v, v, 0.5) == pytest.approx(lp_norm(v, 2, 0.5) ** 2)
    assert inner_product(v, v, 0.5) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        inner_product([1, 2], [1, 2, 3], 1.0)


def test_h1_norm_examples():
    assert h1_norm([0, 1, 0, 0], 0.5) == pytest.approx(math.sqrt(4.5))
    assert h1_norm(np.zeros(7), 0.3) == 0.0
    c, K, dx = 1.5, 10, 0.4
    assert h1_norm(np.full(K, c), dx) == pytest.approx(math.sqrt(c * c * K * dx))


def test_sobolev_constant():
    assert sobolev_constant(1.0) == pytest.approx(math.sqrt(2))
    assert sobolev_constant(4.0) == pytest.approx(2 * math.sqrt(2))
    assert sobolev_constant(0.25) == pytest.approx(2 * math.sqrt(2))
    with pytest.raises(ValueError):
        sobolev_constant(0.0)


@pytest.mark.parametrize("K", [5, 8, 64, 257])
@pytest.mark.parametrize("L", [0.25, 1.0, 40.0])
def test_discrete_sobolev_inequality(rng, K, L):
    dx = L / K
    constant = sobolev_constant(L)
    for _ in range(1000):
        v = rng.standard_normal(K) * rng.uniform(0.01, 100.0)
        assert sup_norm(v) <= constant * h1_norm(v, dx)


@pytest.mark.parametrize("K", [5, 8, 64, 257])
def test_norm_inequalities(rng, K):
    dx = 1.0 / K
    for _ in range(100):
        v, w = rng.standard_normal(K), rng.standard_normal(K)
        v_sq, w_sq = lp_norm(v, 2, dx) ** 2, lp_norm(w, 2, dx) ** 2
        assert 2 * inner_product(v, w, dx) <= (v_sq + w_sq) * (1 + 1e-12)
        assert lp_norm(v + w, 2, dx) ** 2 <= 2 * (v_sq + w_sq) * (1 + 1e-12)
