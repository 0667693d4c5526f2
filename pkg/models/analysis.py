import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional

from pytools.convergence import EOCRecorder

from models.equation import EquationFamily


@dataclass(frozen=True)
class StepBounds:
    """Step-size thresholds for the fixed-point map on the ball ||w||_inf <= q r."""

    eps1: float
    eps2: float
    q: float
    r: float

    @property
    def limit(self):
        return min(self.eps1, self.eps2)

    def admits(self, dt):
        return dt < self.limit

    def to_dict(self):
        return {'eps1': self.eps1, 'eps2': self.eps2, 'q': self.q, 'r': self.r}


@dataclass(frozen=True)
class InvariantReport:
    mass: float
    energy: float
    l2: float
    sup: float

    def __post_init__(self):
        for name in ('mass', 'energy', 'l2', 'sup'):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"Non-finite invariant {name}: {getattr(self, name)}")

    def to_dict(self):
        return {'mass': self.mass, 'energy': self.energy, 'l2': self.l2, 'sup_norm': self.sup}


class ExactKind(str, Enum):
    KDV_SOLITON = 'KdVSoliton'
    CUSTOM = 'Custom'


@dataclass(frozen=True)
class ExactSolution:
    """A closed-form target solution u(t, x).

    KdVSoliton carries ``c`` and ``x0`` and is evaluated by
    ``services.reference.evaluate_exact``; Custom carries ``function(t, x)``.
    ``period`` wraps the soliton phase onto the nearest image when set.
    """

    kind: ExactKind
    c: float = 0.0
    x0: float = 0.0
    function: Optional[Callable] = None
    period: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', ExactKind(self.kind))
        if self.kind is ExactKind.KDV_SOLITON and not self.c > 0:
            raise ValueError(f"Invalid soliton speed c: {self.c}. Must be > 0.")
        if self.kind is ExactKind.CUSTOM and not callable(self.function):
            raise ValueError("Custom exact solution needs a callable function(t, x)")

    @classmethod
    def soliton(cls, c, x0, period=None):
        return cls(ExactKind.KDV_SOLITON, c=c, x0=x0, period=period)

    @classmethod
    def custom(cls, function):
        return cls(ExactKind.CUSTOM, function=function)

    def validate_for(self, spec):
        """Raise ValueError when the closed form does not solve ``spec``."""
        if self.kind is ExactKind.CUSTOM:
            return
        family_ok = (
            spec.family is EquationFamily.KDV
            or (spec.family is EquationFamily.GENERALIZED_KDV and spec.p == 2)
            or (spec.family is EquationFamily.OSTROVSKY and spec.gamma == 0.0)
        )
        if not family_ok:
            raise ValueError(f"KdV soliton does not solve {spec.family.value} with these parameters")
        if spec.alpha == 0.0:
            raise ValueError("KdV soliton requires alpha != 0")
        if not spec.beta < 0:
            raise ValueError(f"KdV soliton requires beta < 0, got {spec.beta}")

    def to_dict(self):
        if self.kind is ExactKind.CUSTOM:
            return {'kind': self.kind.value}
        return {'kind': self.kind.value, 'c': self.c, 'x0': self.x0, 'period': self.period}


@dataclass(frozen=True)
class OracleReference:
    """Reference computed by the spectral oracle from ``initial(x)`` at oracle_factor x finest K."""

    initial: Callable
    oracle_factor: int = 4

    def __post_init__(self):
        if not callable(self.initial):
            raise ValueError("Oracle reference needs a callable initial(x)")
        if isinstance(self.oracle_factor, bool) or not isinstance(self.oracle_factor, int) \
                or self.oracle_factor < 4:
            raise ValueError(f"Invalid oracle_factor: {self.oracle_factor!r}. Must be an integer >= 4.")


@dataclass(frozen=True)
class ConvergenceRow:
    K: int
    M: int
    dx: float
    dt: float
    h1_error: float
    order_estimate: float = float('nan')
    max_sup_norm: float = float('nan')
    error: Optional[str] = None

    @property
    def ok(self):
        return self.error is None

    def to_dict(self):
        return {
            'K': self.K,
            'M': self.M,
            'dx': self.dx,
            'dt': self.dt,
            'h1_error': self.h1_error,
            'order_estimate': self.order_estimate,
            'max_sup_norm': self.max_sup_norm,
            'error': self.error,
        }


@dataclass
class ConvergenceTable:
    rows: List[ConvergenceRow] = field(default_factory=list)

    @property
    def all_converged(self):
        return all(row.ok for row in self.rows)

    def orders(self):
        return [row.order_estimate for row in self.rows]

    def eoc_recorder(self):
        """(dx, h1_error) pairs of the levels with a positive finite error."""
        recorder = EOCRecorder()
        for row in self.rows:
            if math.isfinite(row.h1_error) and row.h1_error > 0.0:
                recorder.add_data_point(row.dx, row.h1_error)
        return recorder

    def fitted_order(self):
        """Least-squares order over all recorded levels; NaN with fewer than two."""
        recorder = self.eoc_recorder()
        if len(recorder.history) < 2:
            return float('nan')
        return float(recorder.order_estimate())

    def to_dict(self):
        return {'rows': [row.to_dict() for row in self.rows], 'all_converged': self.all_converged}


@dataclass(frozen=True)
class TheoryConstants:
    C1: float
    C2: float
    theta: float
    Cqr_bound: float
    log_Cqr: float
    dx_max: Optional[float]
    dx_max_global: float
    dx_max_reason: Optional[str] = None

    def to_dict(self):
        return {
            'C1': self.C1,
            'C2': self.C2,
            'theta': self.theta,
            'Cqr_bound': self.Cqr_bound,
            'log_Cqr': self.log_Cqr,
            'dx_max': self.dx_max,
            'dx_max_global': self.dx_max_global,
            'dx_max_reason': self.dx_max_reason,
        }


@dataclass(frozen=True)
class GronwallReport:
    # largest M0 with the premise holding for every m <= M0; -1 if it fails at m = 0
    premise_holds_through: int
    first_premise_failure: Optional[int]
    conclusion_holds: bool
    bound: float
    issues: tuple = ()

    @property
    def premise_holds(self):
        return self.first_premise_failure is None

    def to_dict(self):
        return {
            'premise_holds_through': self.premise_holds_through,
            'first_premise_failure': self.first_premise_failure,
            'conclusion_holds': self.conclusion_holds,
            'bound': self.bound,
            'issues': list(self.issues),
        }
