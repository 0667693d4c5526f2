"""Discrete Lebesgue/Sobolev norms and the L2 inner product on periodic grid vectors.

All sums go through ``math.fsum`` so conservation checks near 1e-12 are not
swamped by accumulation error.
"""

import math
import numbers

import numpy as np

from services.operators import StencilKind, stencil_apply


def lp_norm(v, p, dx):
    """(sum |v_k|^p dx)^(1/p) for finite p, max |v_k| for p = inf."""
    if not (p == math.inf or (isinstance(p, numbers.Real) and p >= 1)):
        raise ValueError(f"Invalid norm exponent p: {p!r}. Must satisfy 1 <= p <= inf.")
    v = np.asarray(v, dtype=np.float64)
    if v.size == 0:
        return 0.0
    if p == math.inf:
        return float(np.max(np.abs(v)))
    if p == 1:
        return math.fsum(np.abs(v)) * dx
    if p == 2:
        return math.sqrt(math.fsum(v * v) * dx)
    return (math.fsum(np.abs(v) ** p) * dx) ** (1.0 / p)


def sup_norm(v):
    return lp_norm(v, math.inf, 1.0)


def inner_product(v, w, dx):
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if v.shape != w.shape:
        raise ValueError(f"Inner product of vectors with different lengths: {v.shape} vs {w.shape}")
    return math.fsum(v * w) * dx


def squared_norm(v, dx):
    v = np.asarray(v, dtype=np.float64)
    return math.fsum(v * v) * dx


def h1_norm(v, dx):
    """(||v||^2 + ||δ⁺_x v||^2)^(1/2)."""
    v = np.asarray(v, dtype=np.float64)
    forward = stencil_apply(StencilKind.FWD_DIFF, v, dx)
    return math.sqrt(squared_norm(v, dx) + squared_norm(forward, dx))


def sobolev_constant(L):
    """L̂ = sqrt(2) max{sqrt(L), 1/sqrt(L)}, so that ||v||_inf <= L̂ ||v||_H1."""
    if L <= 0:
        raise ValueError(f"Invalid period L: {L}. Must be positive.")
    return math.sqrt(2.0) * max(math.sqrt(L), 1.0 / math.sqrt(L))
