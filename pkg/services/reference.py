"""Reference solutions: the closed-form KdV soliton and a Fourier pseudospectral oracle.

The oracle solves u_t = -alpha f(u)_x + beta u_xxx + gamma ∂_x^{-1} u with an
integrating factor for the linear part, so the dispersive stiffness never
reaches the adaptive integrator.
"""

import logging

import numpy as np
from scipy.integrate import solve_ivp

from config import Config
from models.analysis import ExactKind
from models.equation import EquationFamily
from models.grid import as_state

logger = logging.getLogger(__name__)


class OracleError(RuntimeError):
    pass


def exact_soliton(c, x0, alpha, beta, t, x, L=None):
    """(3c/alpha) sech^2(½ sqrt(c/(-beta)) (x - ct - x0)).

    With ``L`` the phase is wrapped to the nearest periodic image; the dropped
    images are O(exp(-sqrt(c/(-beta)) L/2)).
    """
    if not c > 0:
        raise ValueError(f"Invalid soliton speed c: {c}. Must be > 0.")
    if not beta < 0:
        raise ValueError(f"Invalid beta for the soliton: {beta}. Must be < 0.")
    if alpha == 0:
        raise ValueError("Invalid alpha for the soliton: 0. Must be nonzero.")
    phase = np.asarray(x, dtype=np.float64) - c * t - x0
    if L is not None:
        phase = phase - L * np.round(phase / L)
    width = 0.5 * np.sqrt(c / -beta)
    return 3.0 * c / alpha / np.cosh(width * phase) ** 2


def evaluate_exact(exact, spec, t, x, L=None):
    if exact.kind is ExactKind.CUSTOM:
        return np.asarray(exact.function(t, np.asarray(x, dtype=np.float64)), dtype=np.float64)
    period = exact.period if exact.period is not None else L
    return exact_soliton(exact.c, exact.x0, spec.alpha, spec.beta, t, x, L=period)


def sample_exact(exact, spec, grid, t):
    """ũ at time t on the grid nodes; the soliton is periodized with the grid's L."""
    values = evaluate_exact(exact, spec, t, grid.nodes, L=grid.L)
    return as_state(np.broadcast_to(values, (grid.K,)), grid.K)


def _wavenumbers(K, L):
    return 2.0 * np.pi * np.fft.rfftfreq(K, d=L / K)


def linear_symbol(spec, K, L):
    """Fourier symbol of the linear part beta ∂_x^3 + gamma ∂_x^{-1}; zero on the mean and Nyquist modes."""
    k = _wavenumbers(K, L)
    symbol = spec.beta * (1j * k) ** 3
    if spec.family is EquationFamily.OSTROVSKY and spec.gamma != 0.0:
        nonzero = k != 0.0
        symbol[nonzero] += spec.gamma / (1j * k[nonzero])
    if K % 2 == 0:
        symbol[-1] = 0.0
    return symbol


def dealias_mask(K):
    """2/3 rule: keep rfft modes with index below K/3."""
    return np.arange(K // 2 + 1) < K / 3.0


def _nonlinearity(spec, u):
    if spec.family is EquationFamily.GENERALIZED_KDV:
        return u ** spec.p / spec.p
    return u * u / 2.0


def fourier_interpolate(values, K_fine):
    """Trigonometric interpolant of periodic samples evaluated on K_fine nodes."""
    values = np.asarray(values, dtype=np.float64)
    K = values.shape[0]
    if K_fine % K != 0:
        raise ValueError(f"Fine node count {K_fine} is not a multiple of {K}")
    coefficients = np.fft.rfft(values)
    if K % 2 == 0:
        coefficients[-1] *= 0.5
    padded = np.zeros(K_fine // 2 + 1, dtype=np.complex128)
    padded[:coefficients.shape[0]] = coefficients
    return np.fft.irfft(padded, n=K_fine) * (K_fine / K)


def spectral_reference(spec, u0, grid_fine, t, rtol=None):
    """Pseudospectral solution at time t, sampled back on the nodes of ``u0``'s grid.

    ``u0`` lives on a coarse grid of the same period whose node count divides
    ``grid_fine.K``.
    """
    u0 = as_state(u0)
    K_coarse = u0.shape[0]
    K = grid_fine.K
    if K % K_coarse != 0:
        raise ValueError(f"Oracle grid K={K} is not a multiple of the coarse K={K_coarse}")
    if t < 0:
        raise ValueError(f"Invalid time t: {t}. Must be >= 0.")
    if t == 0:
        return u0.copy()
    rtol = Config.ORACLE_RTOL if rtol is None else rtol

    stride = K // K_coarse
    symbol = linear_symbol(spec, K, grid_fine.L)
    k = _wavenumbers(K, grid_fine.L)
    advection = -spec.alpha * 1j * k * dealias_mask(K)
    if K % 2 == 0:
        advection[-1] = 0.0
    n_modes = k.shape[0]

    u_hat0 = np.fft.rfft(fourier_interpolate(u0, K))
    if K % 2 == 0:
        u_hat0[-1] = 0.0

    def rhs(time, y):
        v_hat = y[:n_modes] + 1j * y[n_modes:]
        rotation = np.exp(symbol * time)
        u = np.fft.irfft(rotation * v_hat, n=K)
        dv_hat = advection * np.fft.rfft(_nonlinearity(spec, u)) / rotation
        return np.concatenate([dv_hat.real, dv_hat.imag])

    y0 = np.concatenate([u_hat0.real, u_hat0.imag])
    atol = rtol * max(1.0, float(np.max(np.abs(y0))))
    logger.info(f"Spectral oracle: K={K}, t={t}, rtol={rtol:g}")
    result = solve_ivp(rhs, (0.0, t), y0, method='DOP853', rtol=rtol, atol=atol)
    if not result.success:
        raise OracleError(f"Spectral oracle failed: {result.message}")
    logger.debug(f"Spectral oracle used {result.nfev} right-hand-side evaluations")

    v_hat = result.y[:n_modes, -1] + 1j * result.y[n_modes:, -1]
    u = np.fft.irfft(np.exp(symbol * t) * v_hat, n=K)
    if not np.all(np.isfinite(u)):
        raise OracleError("Spectral oracle produced non-finite values")
    return u[::stride].copy()


# Sup-norm scaling of random Fourier data is measured on this many points, so
# every grid samples the same function.
FOURIER_SCALE_POINTS = 4096


def fourier_function(L, modes, amplitude, seed=0):
    """Smooth zero-mean random data u(x): modes 1..modes with N(0,1) coefficients damped
    by 1/j^2, scaled so that sup |u| = amplitude."""
    if isinstance(modes, bool) or not isinstance(modes, int) or modes < 1:
        raise ValueError(f"Invalid modes: {modes!r}. Must be an integer >= 1.")
    if not amplitude > 0:
        raise ValueError(f"Invalid amplitude: {amplitude}. Must be > 0.")
    rng = np.random.default_rng(seed)
    coefficients = rng.standard_normal((modes, 2))
    wavenumbers = 2.0 * np.pi * np.arange(1, modes + 1) / L
    damping = 1.0 / np.arange(1, modes + 1) ** 2

    def raw(x):
        phase = np.multiply.outer(np.asarray(x, dtype=np.float64), wavenumbers)
        return (np.cos(phase) @ (coefficients[:, 0] * damping)
                + np.sin(phase) @ (coefficients[:, 1] * damping))

    scale = amplitude / np.max(np.abs(raw(np.arange(FOURIER_SCALE_POINTS) * (L / FOURIER_SCALE_POINTS))))
    return lambda x: scale * raw(x)


def fourier_initial(K, L, modes, amplitude, seed=0):
    if not modes < K / 2:
        raise ValueError(f"Invalid modes: {modes!r}. Must be below K/2={K / 2}.")
    return fourier_function(L, modes, amplitude, seed)(np.arange(K) * (L / K))
