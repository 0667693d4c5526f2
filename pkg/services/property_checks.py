"""Randomized property suites for the operator algebra, the invariants and the a priori bounds.

Each check returns a PropertyResult with the worst relative residual over its
samples. All randomness comes from one seeded numpy Generator per suite, so
a given seed always prints the same report.
"""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from models.equation import EquationFamily, EquationSpec
from models.grid import Grid
from models.solver import SolverConfig, SolverMethod
from services.convergence import gronwall_check
from services.invariants import (
    energy,
    error_energy_A,
    mass,
    modified_error_energy,
    theta_min,
)
from services.norms import h1_norm, inner_product, squared_norm, sobolev_constant, sup_norm
from services.operators import (
    StencilKind,
    TemporalOp,
    fd_inverse,
    operator_norm_estimate,
    stencil_apply,
    temporal_pair,
)
from services.reference import fourier_initial
from services.schemes import dvdm_flux, phi_map, scheme_residual, scheme_rhs, step_size_bounds
from services.solver import SchemeSolver

logger = logging.getLogger(__name__)

SCOPES = ('operators', 'invariants', 'bounds', 'all')
NODE_COUNTS = (5, 8, 64, 257)
# ||fd_inverse|| <= L/4 needs even K; for odd K the mode next to Nyquist gives about L/pi.
INVERSE_NODE_COUNTS = (4, 8, 16, 64)
PERIODS = (0.25, 1.0, 40.0)
IDENTITY_TOL = 1e-13
PAIRS = 100
SOBOLEV_SAMPLES = 1000
ENERGY_SAMPLES = 1000
CONTRACTION_PAIRS = 500


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    samples: int

    def format(self):
        status = 'PASS' if self.passed else 'FAIL'
        return f"{status}  {self.name:<44s} worst={self.worst:.3e} tol={self.tolerance:.1e} n={self.samples}"

    def to_dict(self):
        return {
            'name': self.name,
            'passed': self.passed,
            'worst': self.worst,
            'tolerance': self.tolerance,
            'samples': self.samples,
        }


def _relative(a, b, scale=None):
    """max |a - b| relative to ``scale`` (default: the larger sup norm of a and b)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if scale is None:
        scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    difference = float(np.max(np.abs(a - b)))
    if difference == 0.0:
        return 0.0
    return difference / max(scale, np.finfo(float).tiny)


def _abs_scale(*products):
    """Scale of an inner-product identity: sum of |products| over all terms."""
    return sum(math.fsum(np.abs(np.asarray(p, dtype=np.float64))) for p in products)


def _result(name, residuals, tolerance):
    worst = float(np.max(residuals)) if len(residuals) else 0.0
    passed = bool(np.isfinite(worst) and worst <= tolerance)
    return PropertyResult(name, passed, float(worst), tolerance, len(residuals))


def _random_vectors(rng, K, count=2, scale=1.0):
    return [scale * rng.standard_normal(K) for _ in range(count)]


def _grid_samples(rng):
    """(K, dx) pairs with dx drawn per sample, PAIRS for each node count."""
    for K in NODE_COUNTS:
        for _ in range(PAIRS):
            yield K, float(rng.uniform(0.05, 1.0))


# ---- operator algebra ---------------------------------------------------------

def check_operators(rng):
    kinds = list(StencilKind)
    commute, temporal, split, product, skew, summation = [], [], [], [], [], []
    inverse_composition, inverse_mean = [], []

    for K, dx in _grid_samples(rng):
        v, w = _random_vectors(rng, K)
        for first, second in itertools.combinations(kinds, 2):
            ab = stencil_apply(first, stencil_apply(second, v, dx), dx)
            ba = stencil_apply(second, stencil_apply(first, v, dx), dx)
            commute.append(_relative(ab, ba))

        dt = float(rng.uniform(0.01, 1.0))
        for kind in kinds:
            for op in TemporalOp:
                levelwise = temporal_pair(op, stencil_apply(kind, v, dx), stencil_apply(kind, w, dx), dt)
                outside = stencil_apply(kind, temporal_pair(op, v, w, dt), dx)
                temporal.append(_relative(levelwise, outside))

        fwd = stencil_apply(StencilKind.FWD_DIFF, v, dx)
        bwd = stencil_apply(StencilKind.BWD_DIFF, v, dx)
        split.append(_relative(stencil_apply(StencilKind.CDIFF1, v, dx), (fwd + bwd) / 2.0))
        second = stencil_apply(StencilKind.CDIFF2, v, dx)
        split.append(_relative(second, stencil_apply(StencilKind.FWD_DIFF, bwd, dx)))
        split.append(_relative(second, stencil_apply(StencilKind.BWD_DIFF, fwd, dx)))

        fwd_w = stencil_apply(StencilKind.FWD_DIFF, w, dx)
        left = stencil_apply(StencilKind.FWD_DIFF, v * w, dx)
        right = fwd * np.roll(w, -1) + v * fwd_w
        product.append(_relative(left, right, scale=float(np.max(np.abs(fwd * np.roll(w, -1)) + np.abs(v * fwd_w)))))

        bwd_w = stencil_apply(StencilKind.BWD_DIFF, w, dx)
        lhs = inner_product(fwd, w, dx)
        rhs = -inner_product(v, bwd_w, dx)
        skew.append(_relative(lhs, rhs, scale=_abs_scale(fwd * w, v * bwd_w) * dx))
        central_v = stencil_apply(StencilKind.CDIFF1, v, dx)
        central_w = stencil_apply(StencilKind.CDIFF1, w, dx)
        lhs = inner_product(central_v, w, dx)
        rhs = -inner_product(v, central_w, dx)
        skew.append(_relative(lhs, rhs, scale=_abs_scale(central_v * w, v * central_w) * dx))

        # a = v, b = w
        central_b = central_w
        second_b = stencil_apply(StencilKind.CDIFF2, w, dx)
        lhs_terms = v * central_b * second_b
        rhs_terms = fwd * fwd_w * fwd_w
        lhs = inner_product(v * central_b, second_b, dx)
        rhs = -0.5 * inner_product(fwd * fwd_w, fwd_w, dx)
        summation.append(_relative(lhs, rhs, scale=_abs_scale(lhs_terms, 0.5 * rhs_terms) * dx))

        inverse = fd_inverse(v, dx)
        composed = stencil_apply(StencilKind.CDIFF1, fd_inverse(central_v, dx), dx)
        inverse_composition.append(_relative(composed, central_v))
        inverse_mean.append(abs(math.fsum(inverse)) / max(float(np.sum(np.abs(inverse))), np.finfo(float).tiny))

    return [
        _result("spatial operators commute pairwise", commute, IDENTITY_TOL),
        _result("spatial and temporal operators commute", temporal, IDENTITY_TOL),
        _result("central differences split into one-sided", split, IDENTITY_TOL),
        _result("forward-difference product rule", product, IDENTITY_TOL),
        _result("summation by parts (forward, central)", skew, IDENTITY_TOL),
        _result("cubic-term reduction identity", summation, IDENTITY_TOL),
        _result("CDiff1 o fd_inverse o CDiff1 = CDiff1", inverse_composition, 1e-12),
        _result("fd_inverse output has zero mean", inverse_mean, 1e-12),
    ]


# ---- invariants ---------------------------------------------------------------

def _family_specs():
    return [
        EquationSpec.kdv(alpha=6.0, beta=-1.0),
        EquationSpec.generalized_kdv(alpha=3.0, beta=-1.0, p=3),
        EquationSpec.ostrovsky(alpha=6.0, beta=-1.0, gamma=0.5),
    ]


def _conservation_drift(spec, rng):
    grid = Grid(L=2.0 * np.pi * 4, K=64, T=0.1, M=20)
    u0 = fourier_initial(grid.K, grid.L, modes=5, amplitude=0.5, seed=int(rng.integers(2 ** 31)))
    cfg = SolverConfig(method=SolverMethod.NEWTON, tol=1e-14, max_iter=50)
    series = SchemeSolver(spec, grid, cfg).simulate(u0)
    if not series.completed:
        return math.inf, math.inf
    return series.relative_drift('mass'), series.relative_drift('energy')


def check_invariants(rng):
    telescope, family_energy, flux_symmetry, gkdv_match, phi_equivalence = [], [], [], [], []
    mass_drift, energy_drift = [], []

    for K, dx in _grid_samples(rng):
        v, w = _random_vectors(rng, K)
        central = stencil_apply(StencilKind.CDIFF1, w, dx)
        telescope.append(abs(mass(central, dx)) / max(_abs_scale(central) * dx, np.finfo(float).tiny))

        alpha = float(rng.uniform(-6.0, 6.0))
        beta = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0))
        kdv_spec = EquationSpec.kdv(alpha, beta)
        ostrovsky = EquationSpec.ostrovsky(alpha, beta, gamma=0.0)
        gradient = squared_norm(stencil_apply(StencilKind.FWD_DIFF, v, dx), dx)
        scale = abs(alpha / (3.0 * beta)) * math.fsum(np.abs(v) ** 3) * dx + gradient
        family_energy.append(_relative(energy(kdv_spec, v, dx) * 2.0 / beta, energy(ostrovsky, v, dx), scale=scale))

        for spec in _family_specs():
            flux_symmetry.append(_relative(dvdm_flux(spec, v, w), dvdm_flux(spec, w, v)))

        grid = Grid(L=K * dx, K=K, T=1.0, M=int(rng.integers(1, 100)))
        gkdv = EquationSpec.generalized_kdv(alpha, beta, p=2)
        gkdv_match.append(_relative(scheme_residual(kdv_spec, grid, v, w), scheme_residual(gkdv, grid, v, w)))

        phi_minus_w = phi_map(kdv_spec, grid, w, v) - v
        phi_equivalence.append(_relative(phi_minus_w, -grid.dt * scheme_residual(kdv_spec, grid, v, w),
                                         scale=float(np.max(np.abs(w - v)) + grid.dt * np.max(np.abs(scheme_rhs(kdv_spec, dx, v, w))))))

    for spec in _family_specs():
        drift_mass, drift_energy = _conservation_drift(spec, rng)
        mass_drift.append(drift_mass)
        energy_drift.append(drift_energy)

    return [
        _result("mass of a central difference vanishes", telescope, IDENTITY_TOL),
        _result("KdV energy x 2/beta = Ostrovsky(gamma=0) energy", family_energy, IDENTITY_TOL),
        _result("flux is symmetric in its arguments", flux_symmetry, IDENTITY_TOL),
        _result("GeneralizedKdV(p=2) residual = KdV residual", gkdv_match, 1e-14),
        _result("phi(w) - w = -dt R(w)", phi_equivalence, IDENTITY_TOL),
        _result("relative mass drift (all families)", mass_drift, 1e-12),
        _result("relative energy drift (all families)", energy_drift, 1e-10),
    ]


# ---- a priori bounds -----------------------------------------------------------

def _ball_sample(rng, K, radius):
    return radius * rng.uniform(-1.0, 1.0, K)


def check_bounds(rng):
    sobolev, inverse_norm, modified, a_bound, contraction, self_map, gronwall = [], [], [], [], [], [], []

    for K in NODE_COUNTS:
        for L in PERIODS:
            dx = L / K
            constant = sobolev_constant(L)
            for _ in range(SOBOLEV_SAMPLES):
                v = rng.standard_normal(K) * rng.uniform(0.01, 100.0)
                sobolev.append(max(0.0, sup_norm(v) / (constant * h1_norm(v, dx)) - 1.0))

    for K in INVERSE_NODE_COUNTS:
        for L in PERIODS:
            estimate = operator_norm_estimate(fd_inverse, K, L / K, tol=1e-10)
            inverse_norm.append(max(0.0, estimate / (L / 4.0) - 1.0))

    q, r, L = 2.0, 1.0, 40.0
    for spec in _family_specs():
        theta = theta_min(spec, q, r, L=L)
        # the Ostrovsky threshold uses ||fd_inverse|| <= L/4
        node_counts = INVERSE_NODE_COUNTS if spec.family is EquationFamily.OSTROVSKY else NODE_COUNTS
        for _ in range(ENERGY_SAMPLES):
            K = int(rng.choice(node_counts))
            dx = L / K
            e = _ball_sample(rng, K, 2.0 * q * r)
            h1_squared = h1_norm(e, dx) ** 2
            value = modified_error_energy(spec, e, dx, theta)
            modified.append(max(0.0, (h1_squared - value) / h1_squared))

    kdv = EquationSpec.kdv(alpha=6.0, beta=-1.0)
    for _ in range(ENERGY_SAMPLES):
        K = int(rng.choice(NODE_COUNTS))
        dx = L / K
        e = _ball_sample(rng, K, 2.0 * q * r)
        bound = abs(kdv.alpha) / (3.0 * abs(kdv.beta)) * sup_norm(e) * squared_norm(e, dx)
        a_bound.append(max(0.0, abs(error_energy_A(kdv, e, dx)) / bound - 1.0))

    grid_K, grid_L = 64, 40.0
    bounds = step_size_bounds(q, r, grid_L / grid_K, kdv.alpha, kdv.beta)
    grid = Grid(L=grid_L, K=grid_K, T=0.5 * bounds.limit, M=1)
    for _ in range(CONTRACTION_PAIRS):
        u_curr = _ball_sample(rng, grid_K, r)
        w = _ball_sample(rng, grid_K, q * r)
        w_bar = _ball_sample(rng, grid_K, q * r)
        ratio = sup_norm(phi_map(kdv, grid, u_curr, w) - phi_map(kdv, grid, u_curr, w_bar)) / sup_norm(w - w_bar)
        contraction.append(ratio)
        self_map.append(sup_norm(phi_map(kdv, grid, u_curr, w)) / (q * r))

    dt, T = 1e-3, 1.0
    steps = np.arange(int(T / dt) + 1) * dt
    c, d = 1.0, 10.0
    zero = gronwall_check(np.zeros_like(steps), c, d, dt, T)
    linear = gronwall_check(d * steps, c, d, dt, T)
    fast = gronwall_check(np.exp(3.0 * c * steps) - 1.0, c, d, dt, T)
    brute = _first_premise_failure(np.exp(3.0 * c * steps) - 1.0, c, d, dt)
    gronwall.append(0.0 if zero.premise_holds and zero.conclusion_holds else 1.0)
    gronwall.append(0.0 if linear.premise_holds and linear.conclusion_holds else 1.0)
    gronwall.append(0.0 if fast.first_premise_failure == brute and brute is not None else 1.0)

    return [
        _result("sup norm <= L_hat * H1 norm", sobolev, 0.0),
        _result("||fd_inverse|| <= L/4 (even K)", inverse_norm, 1e-8),
        _result("modified error energy >= ||e||_H1^2", modified, IDENTITY_TOL),
        _result("|A(e)| <= |alpha|/(3|beta|) ||e||_inf ||e||^2", a_bound, IDENTITY_TOL),
        _result("phi contracts for dt < min(eps1, eps2)", [max(0.0, x - 1.0) for x in contraction], 0.0),
        _result("phi maps the q*r ball into itself", [max(0.0, x - 1.0) for x in self_map], 0.0),
        _result("Gronwall checker classifies examples", gronwall, 0.0),
    ]


def _first_premise_failure(v, c, d, dt):
    for m in range(len(v) - 1):
        if (v[m + 1] - v[m]) / dt > c * (v[m + 1] + v[m]) / 2.0 + d:
            return m
    return None


SUITES = {
    'operators': check_operators,
    'invariants': check_invariants,
    'bounds': check_bounds,
}


def run_checks(scope, seed):
    """Runs one suite (or all) with a generator seeded from ``seed``; returns (scope, results) pairs."""
    if scope not in SCOPES:
        raise ValueError(f"Unknown check scope: {scope!r}. Expected one of {', '.join(SCOPES)}.")
    names = list(SUITES) if scope == 'all' else [scope]
    report = []
    for offset, name in enumerate(names):
        rng = np.random.default_rng([seed, offset])
        logger.info(f"Running {name} checks (seed {seed})")
        report.append((name, SUITES[name](rng)))
    return report
