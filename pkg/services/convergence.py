"""Error measurement, refinement studies and the a priori constants of the convergence theory."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from config import Config
from models.analysis import (
    ConvergenceRow,
    ConvergenceTable,
    ExactSolution,
    GronwallReport,
    OracleReference,
    TheoryConstants,
)
from models.grid import Grid, as_state
from services.invariants import theta_min
from services.norms import h1_norm, sobolev_constant
from services.reference import evaluate_exact, sample_exact, spectral_reference
from services.schemes import scheme_residual
from services.solver import SchemeSolver

logger = logging.getLogger(__name__)

# Relative slack for floating-point comparisons in the Gronwall premise.
GRONWALL_RTOL = 1e-9


def truncation_error(spec, grid, exact, m):
    """ξ⁽ᵐ⁾: the scheme residual of the exact solution sampled at levels m and m+1."""
    exact.validate_for(spec)
    if not 0 <= m < grid.M:
        raise ValueError(f"Invalid time level m: {m}. Must satisfy 0 <= m < M={grid.M}.")
    u_m = sample_exact(exact, spec, grid, m * grid.dt)
    u_next = sample_exact(exact, spec, grid, (m + 1) * grid.dt)
    return scheme_residual(spec, grid, u_next, u_m)


def h1_error(u, ref, dx):
    u = np.asarray(u, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if u.shape != ref.shape:
        raise ValueError(f"Cannot compare states of different lengths: {u.shape} vs {ref.shape}")
    return h1_norm(u - ref, dx)


def order_estimate(coarse_error, fine_error):
    """log2 of the error ratio between two levels; NaN when either error is zero or not finite."""
    if not (math.isfinite(coarse_error) and math.isfinite(fine_error)):
        return float('nan')
    if coarse_error <= 0.0 or fine_error <= 0.0:
        return float('nan')
    return math.log2(coarse_error / fine_error)


def _level_grids(base_grid, levels):
    return [base_grid.refine(2 ** j) for j in range(levels)]


def _references(spec, reference, grids):
    """(initial states, final-time references) per level."""
    if isinstance(reference, ExactSolution):
        reference.validate_for(spec)
        initial = [sample_exact(reference, spec, grid, 0.0) for grid in grids]
        final = [sample_exact(reference, spec, grid, grid.T) for grid in grids]
        return initial, final
    if isinstance(reference, OracleReference):
        finest = grids[-1]
        initial = [as_state(np.broadcast_to(reference.initial(grid.nodes), (grid.K,)), grid.K)
                   for grid in grids]
        oracle_grid = Grid(L=finest.L, K=finest.K * reference.oracle_factor, T=finest.T, M=1)
        fine = spectral_reference(spec, initial[-1], oracle_grid, finest.T)
        final = [fine[::finest.K // grid.K].copy() for grid in grids]
        return initial, final
    raise ValueError(f"Unsupported convergence reference: {reference!r}")


def convergence_study(spec, reference, base_grid, levels, cfg=None, max_workers=None):
    """Final-time H1 errors over ``levels`` refinements that halve dx and dt together."""
    if isinstance(levels, bool) or not isinstance(levels, int) or levels < 2:
        raise ValueError(f"Invalid levels: {levels!r}. A convergence study needs at least 2 levels.")
    if base_grid.dt > base_grid.dx:
        raise ValueError(f"Base grid has dt={base_grid.dt:.4e} > dx={base_grid.dx:.4e}; "
                         f"the refinement study requires dt <= dx")

    grids = _level_grids(base_grid, levels)
    initial, final = _references(spec, reference, grids)

    def run_level(index):
        grid = grids[index]
        return SchemeSolver(spec, grid, cfg).simulate(initial[index])

    workers = max_workers or Config.DVDM_THREADS
    logger.info(f"Convergence study: {levels} levels from K={base_grid.K}, M={base_grid.M} "
                f"on {workers} worker(s)")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run_level, range(levels)))

    table = ConvergenceTable()
    previous_error = None
    for grid, series, ref in zip(grids, results, final):
        if series.completed:
            error = h1_error(series.final_state, ref, grid.dx)
            marker = None
        else:
            error = float('nan')
            marker = series.failure.message if series.failure else "incomplete run"
        order = float('nan') if previous_error is None else order_estimate(previous_error, error)
        row = ConvergenceRow(K=grid.K, M=grid.M, dx=grid.dx, dt=grid.dt, h1_error=error,
                             order_estimate=order, max_sup_norm=series.max_sup_norm(), error=marker)
        table.rows.append(row)
        logger.info(f"Level K={grid.K}: h1_error={error:.3e}, order={order:.3f}")
        previous_error = error
    logger.info(f"Fitted order {table.fitted_order():.3f}")
    return table


def gronwall_check(v, c, d, dt, T):
    """Checks δ⁺_t v ≤ c μ⁺_t v + d step by step and the bound v ≤ 2dT exp(2cT) that it implies."""
    v = np.asarray(v, dtype=np.float64)
    issues = []
    if v.ndim != 1 or v.size == 0:
        issues.append("v must be a non-empty sequence")
        return GronwallReport(-1, 0, False, float('nan'), tuple(issues))
    if np.any(v < 0):
        issues.append("v has negative entries")
    if v[0] != 0.0:
        issues.append(f"v[0] = {v[0]!r} is not 0")
    if not c > 0:
        issues.append(f"c = {c!r} is not positive")
    if not d > 0:
        issues.append(f"d = {d!r} is not positive")
    if not (dt > 0 and T > 0):
        issues.append(f"dt = {dt!r} and T = {T!r} must be positive")
        return GronwallReport(-1, 0, False, float('nan'), tuple(issues))
    if (v.size - 1) * dt > T * (1.0 + 1e-12):
        issues.append(f"sequence spans {(v.size - 1) * dt:.6g} > T = {T:.6g}")

    lhs = (v[1:] - v[:-1]) / dt
    rhs = c * (v[1:] + v[:-1]) / 2.0 + d
    slack = GRONWALL_RTOL * np.maximum(np.abs(lhs), np.abs(rhs))
    failures = np.flatnonzero(lhs > rhs + slack)
    first_failure = int(failures[0]) if failures.size else None
    holds_through = (first_failure - 1) if first_failure is not None else lhs.size - 1

    bound = 2.0 * d * T * math.exp(2.0 * c * T)
    last = min(holds_through + 1, v.size - 1)
    conclusion = bool(np.all(v[:last + 1] <= bound))
    return GronwallReport(
        premise_holds_through=holds_through,
        first_premise_failure=first_failure,
        conclusion_holds=conclusion,
        bound=bound,
        issues=tuple(issues),
    )


def _exp_or_inf(value):
    try:
        return math.exp(value)
    except OverflowError:
        return math.inf


def theory_constants(spec, q, r, sup_u, sup_ux, sup_uxx, sup_ut, L, T, c0):
    """Constants of the error analysis as stated; they are far from tight."""
    for name, value in (('sup_u', sup_u), ('sup_ux', sup_ux), ('sup_uxx', sup_uxx), ('sup_ut', sup_ut)):
        if not value >= 0:
            raise ValueError(f"Invalid {name}: {value}. Must be >= 0.")
    for name, value in (('r', r), ('L', L), ('T', T), ('c0', c0)):
        if not value > 0:
            raise ValueError(f"Invalid {name}: {value}. Must be > 0.")

    alpha = abs(spec.alpha)
    beta = abs(spec.beta)
    theta = theta_min(spec, q, r, L=L)

    C1 = max(3.0 * alpha * (2.0 * q * q + 1.0) * r * r + 1.0, alpha / 2.0)
    C2 = max(
        6.0 * alpha / beta * (1.0 + 2.0 * alpha) * q * q * r * r
        + alpha ** 2 / (2.0 * beta) * sup_ux ** 2 + alpha * (2.0 + sup_uxx ** 2),
        1.0 + alpha ** 2 / (2.0 * beta) * r * r
        + alpha * (1.5 * sup_ux ** 2 + 2.0 / 3.0 * sup_ut ** 2 + 2.0 / 3.0),
    )

    log_Cqr = 0.5 * (math.log(2.0 * (alpha / (6.0 * beta) + theta)) + 2.0 * math.log(c0)
                     + math.log(T) + 2.0 * (theta * C1 + C2) * T)
    sobolev = sobolev_constant(L)

    dx_max = None
    reason = None
    if r > sup_u:
        dx_max = _exp_or_inf(0.5 * (math.log(r - sup_u) - math.log(2.0 * sobolev) - log_Cqr))
    else:
        reason = f"r={r} must exceed sup|u|={sup_u} for the mesh restriction to exist"
    dx_max_global = min(_exp_or_inf(0.5 * (math.log(r) - math.log(4.0 * sobolev) - log_Cqr)), 1.0)

    return TheoryConstants(
        C1=C1,
        C2=C2,
        theta=theta,
        Cqr_bound=_exp_or_inf(log_Cqr),
        log_Cqr=log_Cqr,
        dx_max=dx_max,
        dx_max_global=dx_max_global,
        dx_max_reason=reason,
    )


def measure_sup_bounds(exact, spec, L, T, K=1024, samples=101):
    """Sup norms of u, u_x, u_xx and u_t of an exact solution, by sampling.

    Space derivatives are spectral on a K-node periodic grid; u_t is a central
    difference in time.
    """
    exact.validate_for(spec)
    x = np.arange(K) * (L / K)
    k = 2.0 * np.pi * np.fft.rfftfreq(K, d=L / K)
    h = 1e-5 * T
    sup = {'sup_u': 0.0, 'sup_ux': 0.0, 'sup_uxx': 0.0, 'sup_ut': 0.0}
    for t in np.linspace(0.0, T, samples):
        u = np.broadcast_to(evaluate_exact(exact, spec, t, x, L=L), (K,))
        u_hat = np.fft.rfft(u)
        u_x = np.fft.irfft(1j * k * u_hat, n=K)
        u_xx = np.fft.irfft(-(k ** 2) * u_hat, n=K)
        u_t = (evaluate_exact(exact, spec, t + h, x, L=L) - evaluate_exact(exact, spec, t - h, x, L=L)) / (2 * h)
        sup['sup_u'] = max(sup['sup_u'], float(np.max(np.abs(u))))
        sup['sup_ux'] = max(sup['sup_ux'], float(np.max(np.abs(u_x))))
        sup['sup_uxx'] = max(sup['sup_uxx'], float(np.max(np.abs(u_xx))))
        sup['sup_ut'] = max(sup['sup_ut'], float(np.max(np.abs(u_t))))
    return sup
