"""Discrete invariants and the error-energy functionals used in the convergence analysis.

Every energy goes through ``_normalized_energy``; the KdV energy is that
quantity times beta/2. The solver's per-step diagnostics call ``energy`` from
here, so there is exactly one implementation of the conserved functional.
"""

import logging
import math

import numpy as np

from models.analysis import InvariantReport
from models.equation import EquationFamily
from services.norms import squared_norm, sup_norm
from services.operators import StencilKind, fd_inverse, stencil_apply

logger = logging.getLogger(__name__)


def mass(v, dx):
    v = np.asarray(v, dtype=np.float64)
    return math.fsum(v) * dx


def l2_invariant(v, dx):
    return squared_norm(v, dx)


def _power_sum(v, power, dx):
    return math.fsum(np.asarray(v, dtype=np.float64) ** power) * dx


def _potential_coefficient(spec):
    """Coefficient of sum v^{p+1} dx in the beta-normalized energy."""
    if spec.family is EquationFamily.GENERALIZED_KDV:
        return 2.0 * spec.alpha / (spec.p * (spec.p + 1) * spec.beta)
    return spec.alpha / (3.0 * spec.beta)


def error_energy_A(spec, e, dx):
    """Non-quadratic part of the normalized energy evaluated at the error e."""
    e = np.asarray(e, dtype=np.float64)
    value = _potential_coefficient(spec) * _power_sum(e, spec.degree + 1, dx)
    if spec.family is EquationFamily.OSTROVSKY and spec.gamma != 0.0:
        value += spec.gamma / spec.beta * squared_norm(fd_inverse(e, dx), dx)
    return value


def _normalized_energy(spec, v, dx):
    v = np.asarray(v, dtype=np.float64)
    gradient = squared_norm(stencil_apply(StencilKind.FWD_DIFF, v, dx), dx)
    return error_energy_A(spec, v, dx) + gradient


def energy(spec, v, dx):
    """Conserved discrete energy.

    KdV: (alpha/6) sum v^3 dx + (beta/2) ||δ⁺_x v||^2.
    Ostrovsky: (alpha/(3 beta)) sum v^3 dx + ||δ⁺_x v||^2 + (gamma/beta) ||δ_FD^{-1} v||^2.
    GeneralizedKdV: (2 alpha/(p(p+1) beta)) sum v^{p+1} dx + ||δ⁺_x v||^2.
    """
    normalized = _normalized_energy(spec, v, dx)
    if spec.family is EquationFamily.KDV:
        return spec.beta / 2.0 * normalized
    return normalized


def theta_min(spec, q, r, L=None):
    """Smallest theta for which the modified error energy dominates ||e||_H1^2 on ||e||_inf <= 2qr."""
    if not q > 1:
        raise ValueError(f"Invalid q: {q}. Must be > 1.")
    if not r > 0:
        raise ValueError(f"Invalid r: {r}. Must be > 0.")
    alpha = abs(spec.alpha)
    beta = abs(spec.beta)
    if spec.family is EquationFamily.GENERALIZED_KDV:
        p = spec.p
        return 1.0 + 2.0 ** p * alpha * q ** (p - 1) * r ** (p - 1) / (p * (p + 1) * beta)
    if spec.family is EquationFamily.OSTROVSKY:
        gamma = abs(spec.gamma)
        if gamma != 0.0 and L is None:
            raise ValueError("theta_min for Ostrovsky with gamma != 0 needs the period L")
        nonlocal_term = 3.0 * gamma * L ** 2 if gamma != 0.0 else 0.0
        return 1.0 + (32.0 * alpha * q * r + nonlocal_term) / (48.0 * beta)
    return 1.0 + 2.0 * q * r * alpha / (3.0 * beta)


def modified_error_energy(spec, e, dx, theta, q=None, r=None, L=None):
    """theta ||e||^2 + ||δ⁺_x e||^2 + A(e).

    When q and r are given, a theta below ``theta_min`` is logged as a warning.
    """
    if q is not None and r is not None:
        threshold = theta_min(spec, q, r, L=L)
        if theta < threshold:
            logger.warning(f"theta={theta:.6g} is below theta_min={threshold:.6g}; "
                           f"the modified energy may be negative")
    e = np.asarray(e, dtype=np.float64)
    gradient = squared_norm(stencil_apply(StencilKind.FWD_DIFF, e, dx), dx)
    return theta * squared_norm(e, dx) + gradient + error_energy_A(spec, e, dx)


def invariant_report(spec, v, dx):
    return InvariantReport(
        mass=mass(v, dx),
        energy=energy(spec, v, dx),
        l2=l2_invariant(v, dx),
        sup=sup_norm(v),
    )
