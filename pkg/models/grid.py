import math
import numbers
from dataclasses import dataclass

import numpy as np

# The widest stencil in the schemes, δ⟨1⟩_x δ⟨2⟩_x, touches k-2..k+2.
MIN_NODES = 5


@dataclass(frozen=True)
class Grid:
    """Uniform periodic space-time grid on [0, L) x [0, T]."""

    L: float
    K: int
    T: float
    M: int

    def __post_init__(self):
        if not _positive_real(self.L):
            raise ValueError(f"Invalid period L: {self.L}. Must be a positive finite number.")
        if not _positive_real(self.T):
            raise ValueError(f"Invalid final time T: {self.T}. Must be a positive finite number.")
        if not _integer(self.K) or self.K < MIN_NODES:
            raise ValueError(f"Invalid node count K: {self.K}. Must be an integer >= {MIN_NODES}.")
        if not _integer(self.M) or self.M < 1:
            raise ValueError(f"Invalid step count M: {self.M}. Must be an integer >= 1.")
        object.__setattr__(self, 'L', float(self.L))
        object.__setattr__(self, 'T', float(self.T))
        object.__setattr__(self, 'K', int(self.K))
        object.__setattr__(self, 'M', int(self.M))

    @property
    def dx(self):
        return self.L / self.K

    @property
    def dt(self):
        return self.T / self.M

    @property
    def nodes(self):
        return np.arange(self.K) * self.dx

    def refine(self, factor=2):
        """Grid with both dx and dt divided by ``factor``."""
        return Grid(L=self.L, K=self.K * factor, T=self.T, M=self.M * factor)

    def to_dict(self):
        return {
            'L': self.L,
            'K': self.K,
            'T': self.T,
            'M': self.M,
            'dx': self.dx,
            'dt': self.dt,
        }


def make_grid(L, K, T, M):
    return Grid(L=L, K=K, T=T, M=M)


def as_state(values, K=None):
    """Validate ``values`` as one time level: a finite float64 vector (of length K if given)."""
    state = np.array(values, dtype=np.float64)
    if state.ndim != 1:
        raise ValueError(f"State must be a one-dimensional vector, got shape {state.shape}")
    if K is not None and state.shape[0] != K:
        raise ValueError(f"State length {state.shape[0]} does not match grid K={K}")
    if not np.all(np.isfinite(state)):
        raise ValueError("State contains non-finite entries")
    return state


def _positive_real(value):
    return (isinstance(value, numbers.Real) and not isinstance(value, bool)
            and math.isfinite(value) and value > 0)


def _integer(value):
    return isinstance(value, numbers.Integral) and not isinstance(value, bool)
