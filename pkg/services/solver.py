import logging

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from models.equation import EquationFamily
from models.grid import as_state
from models.solver import SolverConfig, SolverMethod, StepDiagnostics, StepFailure, TimeSeries
from services.invariants import invariant_report, mass
from services.norms import sup_norm
from services.operators import StencilKind, operator_matrix, stencil_matrix
from services.schemes import (
    dvdm_flux_derivative,
    nonlocal_apply,
    phi_map,
    scheme_residual,
    step_size_bounds,
)

MAX_HALVINGS = 10
# Dense Newton refactors the Jacobian when an update shrinks by less than this factor.
CHORD_CONTRACTION = 0.5


class NonConvergenceError(RuntimeError):
    def __init__(self, iterations, last_update_norm, step=None):
        where = f" at step {step}" if step is not None else ""
        super().__init__(f"Iteration did not converge{where} after {iterations} iterations "
                         f"(last update norm {last_update_norm:.3e})")
        self.iterations = iterations
        self.last_update_norm = last_update_norm
        self.step = step


class StepSizeGuardError(ValueError):
    def __init__(self, eps1, eps2, dt, step=None):
        super().__init__(f"Time step dt={dt:.6e} violates the step-size guard: "
                         f"needs dt < min(eps1={eps1:.6e}, eps2={eps2:.6e})")
        self.eps1 = eps1
        self.eps2 = eps2
        self.dt = dt
        self.step = step


class SchemeSolver:
    """Advances the conservative scheme on one grid with one solver configuration.

    The Newton linear part (identity/dt, dispersion and, for Ostrovsky, the
    nonlocal term) is assembled once here; only the flux block changes per iterate.
    """

    def __init__(self, spec, grid, cfg=None):
        self.logger = logging.getLogger(__name__)
        self.spec = spec
        self.grid = grid
        self.cfg = cfg or SolverConfig()
        self.bounds = None
        self._guard_warned = False

        guard = self.cfg.guard
        if guard is not None:
            self.bounds = step_size_bounds(guard.q, guard.r, grid.dx, spec.alpha, spec.beta)

        if self.cfg.method is SolverMethod.NEWTON:
            self._build_linear_part()

    def _build_linear_part(self):
        K, dx, dt = self.grid.K, self.grid.dx, self.grid.dt
        self._d1 = stencil_matrix(StencilKind.CDIFF1, K, dx)
        dispersion = self._d1 @ stencil_matrix(StencilKind.CDIFF2, K, dx)
        linear = sp.identity(K, format='csr') / dt - self.spec.beta / 2.0 * dispersion
        self._dense = self.spec.family is EquationFamily.OSTROVSKY and self.spec.gamma != 0.0
        if self._dense:
            nonlocal_matrix = operator_matrix(nonlocal_apply, K, dx)
            self._linear = linear.toarray() - self.spec.gamma / 2.0 * nonlocal_matrix
            self._d1_dense = self._d1.toarray()
        else:
            self._linear = linear.tocsr()

    def _jacobian(self, w, u_curr):
        """Sparse CSC Jacobian, or the LU factors of the dense Ostrovsky one."""
        slope = self.spec.flux_coefficient * dvdm_flux_derivative(self.spec, w, u_curr)
        if self._dense:
            return scipy.linalg.lu_factor(self._linear + self._d1_dense * slope[np.newaxis, :])
        return (self._linear + self._d1 @ sp.diags(slope, 0, format='csr')).tocsc()

    def _newton_direction(self, jacobian, residual):
        if self._dense:
            return scipy.linalg.lu_solve(jacobian, -residual)
        return spsolve(jacobian, -residual)

    def _check_guard(self, step):
        """Returns warning strings; raises when an enforced KdV guard is violated."""
        if self.bounds is None or self.bounds.admits(self.grid.dt):
            return []
        dt = self.grid.dt
        if self.cfg.guard.enforce and self.spec.family is EquationFamily.KDV:
            raise StepSizeGuardError(self.bounds.eps1, self.bounds.eps2, dt, step)
        message = (f"dt={dt:.3e} is not below min(eps1, eps2)={self.bounds.limit:.3e}; "
                   f"fixed-point contraction is not guaranteed")
        if self.spec.family is not EquationFamily.KDV:
            message += f" (KdV bound used as a heuristic for {self.spec.family.value})"
        if not self._guard_warned:
            self.logger.warning(message)
            self._guard_warned = True
        return [message]

    def _iterate_fixed_point(self, u_curr, w):
        updates = []
        for _ in range(self.cfg.max_iter):
            w_next = phi_map(self.spec, self.grid, u_curr, w)
            update = sup_norm(w_next - w)
            updates.append(update)
            w = w_next
            if not np.isfinite(update):
                break
            if update <= self.cfg.tol:
                return w, updates, True
        return w, updates, False

    def _iterate_newton(self, u_curr, w):
        dt = self.grid.dt
        residual = scheme_residual(self.spec, self.grid, w, u_curr)
        updates = []
        jacobian = None
        for _ in range(self.cfg.max_iter):
            # Dense LU factors are reused (chord iteration) while the updates keep contracting.
            if jacobian is None or not self._dense:
                jacobian = self._jacobian(w, u_curr)
            direction = self._newton_direction(jacobian, residual)
            scale = 1.0
            trial = w + direction
            trial_residual = scheme_residual(self.spec, self.grid, trial, u_curr)
            old_norm = sup_norm(residual)
            halvings = 0
            if old_norm > self.cfg.tol / dt:
                while sup_norm(trial_residual) > old_norm and halvings < MAX_HALVINGS:
                    scale /= 2.0
                    halvings += 1
                    trial = w + scale * direction
                    trial_residual = scheme_residual(self.spec, self.grid, trial, u_curr)
                if halvings:
                    self.logger.debug(f"Newton step damped by {scale:g}")
            update = sup_norm(trial - w)
            if halvings or (updates and update > CHORD_CONTRACTION * updates[-1]):
                jacobian = None
            updates.append(update)
            w, residual = trial, trial_residual
            if not np.isfinite(update):
                break
            if update <= self.cfg.tol:
                return w, updates, True
        return w, updates, False

    def advance(self, u_curr, step=0, u_prev=None, history_sup=None):
        """One step from ``u_curr``; returns (u_next, StepDiagnostics)."""
        u_curr = as_state(u_curr, self.grid.K)
        warnings = self._check_guard(step)

        if self.cfg.extrapolate and u_prev is not None:
            w0 = 2.0 * u_curr - as_state(u_prev, self.grid.K)
        else:
            w0 = u_curr.copy()

        if self.cfg.method is SolverMethod.FIXED_POINT:
            w, updates, converged = self._iterate_fixed_point(u_curr, w0)
        else:
            w, updates, converged = self._iterate_newton(u_curr, w0)

        last_update = updates[-1] if updates else float('nan')
        if not converged:
            raise NonConvergenceError(len(updates), last_update, step)

        residual_norm = sup_norm(scheme_residual(self.spec, self.grid, w, u_curr))
        if residual_norm > self.cfg.tol / self.grid.dt:
            self.logger.debug(f"Step {step}: residual {residual_norm:.3e} above tol/dt "
                              f"after the update criterion was met")

        contraction = 0.0
        if len(updates) >= 2 and updates[-2] > 0:
            contraction = updates[-1] / updates[-2]

        within = None
        guard = self.cfg.guard
        if guard is not None:
            history = sup_norm(u_curr) if history_sup is None else history_sup
            if history <= guard.r:
                within = sup_norm(w) <= guard.q * guard.r
                if not within:
                    warnings.append(f"||u_next||_inf={sup_norm(w):.6e} exceeds q*r={guard.q * guard.r:.6e}")

        report = invariant_report(self.spec, w, self.grid.dx)
        diagnostics = StepDiagnostics(
            iterations=len(updates),
            final_update_norm=last_update,
            contraction_estimate=contraction,
            sup_norm=report.sup,
            mass=report.mass,
            energy=report.energy,
            l2=report.l2,
            residual_norm=residual_norm,
            within_local_bound=within,
            warnings=tuple(warnings),
        )
        self.logger.debug(f"Step {step}: {diagnostics.iterations} iterations, "
                          f"update {last_update:.3e}, sup {report.sup:.6e}")
        return w, diagnostics

    def simulate(self, u0):
        """Runs all M steps; a non-converged step ends the run with ``failure`` set."""
        u0 = as_state(u0, self.grid.K)
        initial = invariant_report(self.spec, u0, self.grid.dx)
        series = TimeSeries(
            grid=self.grid,
            spec=self.spec,
            states=[u0],
            initial_invariants={'mass': initial.mass, 'energy': initial.energy,
                                'l2': initial.l2, 'sup_norm': initial.sup,
                                'mass_scale': mass(np.abs(u0), self.grid.dx)},
        )
        self.logger.info(f"Simulating {self.spec.family.value} on K={self.grid.K}, M={self.grid.M} "
                         f"(dx={self.grid.dx:.4e}, dt={self.grid.dt:.4e}, {self.cfg.method.value})")

        history_sup = initial.sup
        u_prev = None
        for m in range(self.grid.M):
            u_curr = series.states[-1]
            try:
                u_next, diagnostics = self.advance(u_curr, step=m, u_prev=u_prev, history_sup=history_sup)
            except NonConvergenceError as e:
                self.logger.error(f"Simulation stopped: {e}")
                series.failure = StepFailure(step=m, iterations=e.iterations,
                                             last_update_norm=e.last_update_norm, message=str(e))
                break
            series.states.append(u_next)
            series.diags.append(diagnostics)
            history_sup = max(history_sup, diagnostics.sup_norm)
            u_prev = u_curr

        if series.completed:
            self.logger.info(f"Simulation finished: mass drift {series.relative_drift('mass'):.3e}, "
                             f"energy drift {series.relative_drift('energy'):.3e}")
        return series


def advance(spec, grid, u_curr, cfg=None):
    return SchemeSolver(spec, grid, cfg).advance(u_curr)


def simulate(spec, grid, u0, cfg=None):
    return SchemeSolver(spec, grid, cfg).simulate(u0)
