"""Periodic difference/average operators and the discrete generalized inverse of δ⟨1⟩_x.

Operators act along axis 0, so a 2-D array is treated as a batch of column
vectors; the solver path only ever passes 1-D states.
"""

import logging
from enum import Enum
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse as sp

logger = logging.getLogger(__name__)


class StencilKind(str, Enum):
    FWD_DIFF = 'FwdDiff'            # δ⁺_x
    BWD_DIFF = 'BwdDiff'            # δ⁻_x
    CDIFF1 = 'CDiff1'               # δ⟨1⟩_x
    CDIFF2 = 'CDiff2'               # δ⟨2⟩_x
    FWD_AVG_SPACE = 'FwdAvgSpace'   # μ⁺_x
    CAVG1 = 'CAvg1'                 # μ⟨1⟩_x


class TemporalOp(str, Enum):
    FWD_DIFF_T = 'FwdDiffT'         # δ⁺_t
    FWD_AVG_T = 'FwdAvgT'           # μ⁺_t


class PowerIterationError(RuntimeError):
    def __init__(self, iterations, estimate):
        super().__init__(f"Power iteration did not converge after {iterations} iterations "
                         f"(last estimate {estimate:.6e})")
        self.iterations = iterations
        self.estimate = estimate


def _next(v):
    return np.roll(v, -1, axis=0)


def _prev(v):
    return np.roll(v, 1, axis=0)


def stencil_apply(kind, v, dx):
    kind = StencilKind(kind)
    v = np.asarray(v, dtype=np.float64)
    if kind is StencilKind.FWD_DIFF:
        return (_next(v) - v) / dx
    if kind is StencilKind.BWD_DIFF:
        return (v - _prev(v)) / dx
    if kind is StencilKind.CDIFF1:
        return (_next(v) - _prev(v)) / (2.0 * dx)
    if kind is StencilKind.CDIFF2:
        return (_next(v) - 2.0 * v + _prev(v)) / (dx * dx)
    if kind is StencilKind.FWD_AVG_SPACE:
        return (_next(v) + v) / 2.0
    return (_next(v) + _prev(v)) / 2.0


def dispersion_apply(v, dx):
    """δ⟨1⟩_x δ⟨2⟩_x v, the discrete third derivative."""
    return stencil_apply(StencilKind.CDIFF1, stencil_apply(StencilKind.CDIFF2, v, dx), dx)


def temporal_pair(op, u_next, u_curr, dt=None):
    op = TemporalOp(op)
    u_next = np.asarray(u_next, dtype=np.float64)
    u_curr = np.asarray(u_curr, dtype=np.float64)
    if u_next.shape != u_curr.shape:
        raise ValueError(f"Time levels have different lengths: {u_next.shape} vs {u_curr.shape}")
    if op is TemporalOp.FWD_AVG_T:
        return (u_next + u_curr) / 2.0
    if dt is None or dt <= 0:
        raise ValueError(f"Invalid time step dt: {dt}. Must be positive for {op.value}.")
    return (u_next - u_curr) / dt


def _is_power_of_two(n):
    return n > 0 and (n & (n - 1)) == 0


@lru_cache(maxsize=16)
def _dft_matrix(K):
    matrix = scipy.linalg.dft(K)
    matrix.setflags(write=False)
    return matrix


def _fourier_multiply(values, multiplier):
    """Apply a Fourier multiplier (indexed like numpy.fft.fftfreq) along axis 0."""
    K = values.shape[0]
    scale = multiplier if values.ndim == 1 else multiplier[:, np.newaxis]
    if _is_power_of_two(K):
        return np.fft.ifft(scale * np.fft.fft(values, axis=0), axis=0).real
    dft = _dft_matrix(K)
    return (dft.conj().T @ (scale * (dft @ values))).real / K


def cdiff1_symbol(K, dx):
    """Fourier symbol i sin(2πj/K)/dx of δ⟨1⟩_x for modes j = 0..K-1."""
    return 1j * np.sin(2.0 * np.pi * np.arange(K) / K) / dx


def cdiff1_kernel_mask(K):
    """True for the modes δ⟨1⟩_x annihilates: the mean and, for even K, the Nyquist mode."""
    mask = np.zeros(K, dtype=bool)
    mask[0] = True
    if K % 2 == 0:
        mask[K // 2] = True
    return mask


def fd_inverse(v, dx):
    """Spectral pseudo-inverse of δ⟨1⟩_x (δ_FD^{-1}); the output always has zero mean."""
    v = np.asarray(v, dtype=np.float64)
    K = v.shape[0]
    symbol = cdiff1_symbol(K, dx)
    kernel = cdiff1_kernel_mask(K)
    inverse_symbol = np.zeros(K, dtype=np.complex128)
    inverse_symbol[~kernel] = 1.0 / symbol[~kernel]
    return _fourier_multiply(v, inverse_symbol)


def as_linear_operator(op):
    """Normalize an operator handle (StencilKind, or callable (v, dx) -> w) to a callable."""
    if isinstance(op, (StencilKind, str)):
        kind = StencilKind(op)
        return lambda v, dx: stencil_apply(kind, v, dx)
    if callable(op):
        return op
    raise ValueError(f"Unsupported operator handle: {op!r}")


def operator_matrix(op, K, dx):
    """Dense K x K matrix of a linear operator, built column by column. Diagnostics only."""
    apply = as_linear_operator(op)
    columns = [np.asarray(apply(unit, dx), dtype=np.float64) for unit in np.eye(K)]
    return np.column_stack(columns)


def operator_norm_estimate(op, K, dx, tol=1e-8, max_iter=10000, seed=0):
    """Spectral norm via power iteration on AᵀA, to relative tolerance ``tol``."""
    matrix = operator_matrix(op, K, dx)
    gram = matrix.T @ matrix
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(K)
    x /= np.linalg.norm(x)
    estimate = 0.0
    for iteration in range(1, max_iter + 1):
        y = gram @ x
        norm_y = np.linalg.norm(y)
        if norm_y == 0.0:
            return 0.0
        previous = estimate
        estimate = float(x @ y)
        x = y / norm_y
        if iteration > 1 and abs(estimate - previous) <= tol * abs(estimate):
            logger.debug(f"Power iteration converged in {iteration} iterations")
            return float(np.sqrt(max(estimate, 0.0)))
    raise PowerIterationError(max_iter, float(np.sqrt(max(estimate, 0.0))))


# Circulant weights {offset: weight}; row k of the matrix picks v[k + offset].
def _stencil_weights(kind, dx):
    kind = StencilKind(kind)
    if kind is StencilKind.FWD_DIFF:
        return {1: 1.0 / dx, 0: -1.0 / dx}
    if kind is StencilKind.BWD_DIFF:
        return {0: 1.0 / dx, -1: -1.0 / dx}
    if kind is StencilKind.CDIFF1:
        return {1: 0.5 / dx, -1: -0.5 / dx}
    if kind is StencilKind.CDIFF2:
        return {1: 1.0 / dx ** 2, 0: -2.0 / dx ** 2, -1: 1.0 / dx ** 2}
    if kind is StencilKind.FWD_AVG_SPACE:
        return {1: 0.5, 0: 0.5}
    return {1: 0.5, -1: 0.5}


def circulant_matrix(weights, K):
    """Sparse periodic matrix from {offset: weight}, wrapping offsets modulo K."""
    matrix = sp.csr_matrix((K, K))
    for offset, weight in weights.items():
        diagonal = sp.diags(np.full(K, weight), 0, shape=(K, K), format='csr')
        permutation = sp.csr_matrix(
            (np.ones(K), (np.arange(K), (np.arange(K) + offset) % K)), shape=(K, K))
        matrix = matrix + diagonal @ permutation
    return matrix.tocsr()


def stencil_matrix(kind, K, dx):
    return circulant_matrix(_stencil_weights(kind, dx), K)
