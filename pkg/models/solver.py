import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from models.equation import EquationSpec
from models.grid import Grid


class SolverMethod(str, Enum):
    FIXED_POINT = 'FixedPoint'
    NEWTON = 'Newton'


@dataclass(frozen=True)
class Guard:
    """Step-size guard built on the self-mapping/contraction bounds of the fixed-point map."""

    q: float
    r: float
    enforce: bool = False

    def __post_init__(self):
        if not self.q > 1:
            raise ValueError(f"Invalid guard q: {self.q}. Must be > 1.")
        if not self.r > 0:
            raise ValueError(f"Invalid guard r: {self.r}. Must be > 0.")

    def to_dict(self):
        return {'q': self.q, 'r': self.r, 'enforce': self.enforce}


@dataclass(frozen=True)
class SolverConfig:
    method: SolverMethod = SolverMethod.NEWTON
    tol: float = 1e-12
    max_iter: int = 50
    guard: Optional[Guard] = None
    extrapolate: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, 'method', SolverMethod(self.method))
        except ValueError:
            raise ValueError(f"Unknown solver method: {self.method!r}. Expected FixedPoint or Newton.")
        if not (isinstance(self.tol, (int, float)) and self.tol > 0 and math.isfinite(self.tol)):
            raise ValueError(f"Invalid tolerance: {self.tol!r}. Must be a positive number.")
        if isinstance(self.max_iter, bool) or not isinstance(self.max_iter, int) or self.max_iter < 1:
            raise ValueError(f"Invalid max_iter: {self.max_iter!r}. Must be an integer >= 1.")

    def to_dict(self):
        return {
            'method': self.method.value,
            'tol': self.tol,
            'max_iter': self.max_iter,
            'guard': self.guard.to_dict() if self.guard else None,
            'extrapolate': self.extrapolate,
        }


@dataclass(frozen=True)
class StepDiagnostics:
    iterations: int
    final_update_norm: float
    contraction_estimate: float
    sup_norm: float
    mass: float
    energy: float
    l2: float
    residual_norm: float = float('nan')
    within_local_bound: Optional[bool] = None
    warnings: Tuple[str, ...] = ()

    def to_dict(self):
        return {
            'iterations': self.iterations,
            'update_norm': self.final_update_norm,
            'contraction_estimate': self.contraction_estimate,
            'sup_norm': self.sup_norm,
            'mass': self.mass,
            'energy': self.energy,
            'l2': self.l2,
            'residual_norm': self.residual_norm,
            'within_local_bound': self.within_local_bound,
            'warnings': list(self.warnings),
        }


@dataclass(frozen=True)
class StepFailure:
    """Marker left on a partial TimeSeries when a step did not converge."""

    step: int
    iterations: int
    last_update_norm: float
    message: str

    def to_dict(self):
        return {
            'step': self.step,
            'iterations': self.iterations,
            'last_update_norm': self.last_update_norm,
            'message': self.message,
        }


@dataclass
class TimeSeries:
    grid: Grid
    spec: EquationSpec
    states: List[np.ndarray] = field(default_factory=list)
    diags: List[StepDiagnostics] = field(default_factory=list)
    failure: Optional[StepFailure] = None
    # mass/energy/l2/sup_norm of states[0], plus mass_scale = sum |u0| dx
    initial_invariants: dict = field(default_factory=dict)

    @property
    def completed(self):
        return self.failure is None and len(self.diags) == self.grid.M

    @property
    def final_state(self):
        return self.states[-1]

    def max_sup_norm(self):
        return max(float(np.max(np.abs(state))) for state in self.states)

    def relative_drift(self, quantity):
        """max_m |q(m) - q(0)| / max(|q(0)|, q_scale, tiny) for a diagnostics attribute name.

        ``mass_scale`` (sum |u0| dx) keeps the mass drift meaningful for zero-mean data.
        """
        if not self.diags:
            return 0.0
        initial = self.initial_invariants[quantity]
        values = np.array([getattr(diag, quantity) for diag in self.diags])
        floor = self.initial_invariants.get(f"{quantity}_scale", 0.0)
        scale = max(abs(initial), floor, np.finfo(float).tiny)
        return float(np.max(np.abs(values - initial)) / scale)

    def to_dict(self, stride=1):
        snapshots = [
            {'step': m, 'time': m * self.grid.dt, 'values': self.states[m].tolist()}
            for m in range(0, len(self.states), stride)
        ]
        if snapshots and snapshots[-1]['step'] != len(self.states) - 1:
            last = len(self.states) - 1
            snapshots.append({'step': last, 'time': last * self.grid.dt, 'values': self.states[last].tolist()})
        return {
            'grid': self.grid.to_dict(),
            'equation': self.spec.to_dict(),
            'completed': self.completed,
            'failure': self.failure.to_dict() if self.failure else None,
            'snapshots': snapshots,
        }
