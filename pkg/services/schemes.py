"""The energy-conservative scheme for KdV, generalized KdV and Ostrovsky.

One step reads δ⁺_t u = RHS(u_next, u_curr) with

    RHS = -c δ⟨1⟩_x F(u_next, u_curr) + β δ⟨1⟩_x δ⟨2⟩_x μ⁺_t u  [+ γ δ⟨1⟩_x (δ_FD^{-1})² μ⁺_t u]

where c = α/6 (KdV, Ostrovsky) or α/(p(p+1)) (generalized KdV) and F is the
symmetric flux polynomial of ``dvdm_flux``.
"""

import numpy as np

from models.analysis import StepBounds
from models.equation import EquationFamily
from services.operators import StencilKind, dispersion_apply, fd_inverse, stencil_apply


def dvdm_flux(spec, u_next, u_curr):
    """F(a, b) = sum_{j=0}^{p} a^j b^{p-j}, i.e. (a^{p+1} - b^{p+1})/(a - b) without the 0/0."""
    a = np.asarray(u_next, dtype=np.float64)
    b = np.asarray(u_curr, dtype=np.float64)
    degree = spec.degree
    if degree == 2:
        return a * a + a * b + b * b
    total = np.zeros(np.broadcast(a, b).shape)
    a_power = np.ones_like(total)
    for j in range(degree + 1):
        total += a_power * b ** (degree - j)
        a_power = a_power * a
    return total


def dvdm_flux_derivative(spec, u_next, u_curr):
    """dF/da, used by the Newton Jacobian."""
    a = np.asarray(u_next, dtype=np.float64)
    b = np.asarray(u_curr, dtype=np.float64)
    degree = spec.degree
    if degree == 2:
        return 2.0 * a + b
    total = np.zeros(np.broadcast(a, b).shape)
    for j in range(1, degree + 1):
        total += j * a ** (j - 1) * b ** (degree - j)
    return total


def nonlocal_apply(v, dx):
    """δ⟨1⟩_x (δ_FD^{-1})² v, the Ostrovsky rotation term without γ."""
    return stencil_apply(StencilKind.CDIFF1, fd_inverse(fd_inverse(v, dx), dx), dx)


def scheme_rhs(spec, dx, u_next, u_curr):
    u_next = np.asarray(u_next, dtype=np.float64)
    u_curr = np.asarray(u_curr, dtype=np.float64)
    if u_next.shape != u_curr.shape:
        raise ValueError(f"Time levels have different lengths: {u_next.shape} vs {u_curr.shape}")
    average = (u_next + u_curr) / 2.0
    flux = dvdm_flux(spec, u_next, u_curr)
    rhs = (-spec.flux_coefficient * stencil_apply(StencilKind.CDIFF1, flux, dx)
           + spec.beta * dispersion_apply(average, dx))
    if spec.family is EquationFamily.OSTROVSKY and spec.gamma != 0.0:
        rhs = rhs + spec.gamma * nonlocal_apply(average, dx)
    return rhs


def scheme_residual(spec, grid, u_next, u_curr):
    """R = δ⁺_t u - RHS; zero exactly when (u_curr, u_next) satisfies the scheme."""
    u_next = np.asarray(u_next, dtype=np.float64)
    u_curr = np.asarray(u_curr, dtype=np.float64)
    _check_length(grid, u_next, u_curr)
    return (u_next - u_curr) / grid.dt - scheme_rhs(spec, grid.dx, u_next, u_curr)


def phi_map(spec, grid, u_curr, w):
    """φ(w) = u_curr + Δt RHS(w, u_curr); its fixed points are the scheme solutions."""
    u_curr = np.asarray(u_curr, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    _check_length(grid, w, u_curr)
    return u_curr + grid.dt * scheme_rhs(spec, grid.dx, w, u_curr)


def step_size_bounds(q, r, dx, alpha, beta):
    """Time-step thresholds below which φ maps the ball ||w||_inf <= q r into itself (eps1)
    and is a contraction there (eps2)."""
    if not q > 1:
        raise ValueError(f"Invalid q: {q}. Must be > 1.")
    if not r > 0:
        raise ValueError(f"Invalid r: {r}. Must be > 0.")
    if not dx > 0:
        raise ValueError(f"Invalid dx: {dx}. Must be > 0.")
    nonlinear = abs(alpha) / 6.0 * dx ** 2
    eps1 = (q - 1.0) * dx ** 3 / (nonlinear * (q * q + q + 1.0) * r + 1.5 * abs(beta) * (q + 1.0))
    eps2 = dx ** 3 / (nonlinear * (2.0 * q + 1.0) * r + 1.5 * abs(beta))
    return StepBounds(eps1=eps1, eps2=eps2, q=q, r=r)


def _check_length(grid, *states):
    for state in states:
        if state.shape != (grid.K,):
            raise ValueError(f"State of shape {state.shape} does not match grid K={grid.K}")
