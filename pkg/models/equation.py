import math
import numbers
from dataclasses import dataclass
from enum import Enum


class EquationFamily(str, Enum):
    KDV = 'KdV'
    GENERALIZED_KDV = 'GeneralizedKdV'
    OSTROVSKY = 'Ostrovsky'


@dataclass(frozen=True)
class EquationSpec:
    """u_t = -alpha (f(u))_x + beta u_xxx on a periodic domain.

    KdV: f(u) = u^2/2. GeneralizedKdV: f(u) = u^p/p. Ostrovsky: KdV plus the
    nonlocal term gamma * d_x^{-1} u.
    """

    family: EquationFamily
    alpha: float
    beta: float
    p: int = 2
    gamma: float = 0.0

    def __post_init__(self):
        try:
            family = EquationFamily(self.family)
        except ValueError:
            choices = ', '.join(f.value for f in EquationFamily)
            raise ValueError(f"Unknown equation family: {self.family!r}. Expected one of {choices}.")
        object.__setattr__(self, 'family', family)

        for name in ('alpha', 'beta', 'gamma'):
            value = getattr(self, name)
            if not isinstance(value, numbers.Real) or isinstance(value, bool) or not math.isfinite(value):
                raise ValueError(f"Invalid {name}: {value!r}. Must be a finite real number.")
            object.__setattr__(self, name, float(value))
        if self.beta == 0.0:
            raise ValueError("Invalid beta: 0. The dispersive coefficient must be nonzero.")

        if not isinstance(self.p, numbers.Integral) or isinstance(self.p, bool) or self.p < 1:
            raise ValueError(f"Invalid p: {self.p!r}. Must be an integer >= 1.")
        object.__setattr__(self, 'p', int(self.p))
        if family is not EquationFamily.GENERALIZED_KDV and self.p != 2:
            raise ValueError(f"p={self.p} is only meaningful for the GeneralizedKdV family")
        if family is not EquationFamily.OSTROVSKY and self.gamma != 0.0:
            raise ValueError(f"gamma={self.gamma} is only meaningful for the Ostrovsky family")

    @classmethod
    def kdv(cls, alpha, beta):
        return cls(EquationFamily.KDV, alpha, beta)

    @classmethod
    def generalized_kdv(cls, alpha, beta, p):
        return cls(EquationFamily.GENERALIZED_KDV, alpha, beta, p=p)

    @classmethod
    def ostrovsky(cls, alpha, beta, gamma):
        return cls(EquationFamily.OSTROVSKY, alpha, beta, gamma=gamma)

    @property
    def flux_coefficient(self):
        """Leading coefficient in front of δ⟨1⟩_x applied to the flux polynomial."""
        if self.family is EquationFamily.GENERALIZED_KDV:
            return self.alpha / (self.p * (self.p + 1))
        return self.alpha / 6.0

    @property
    def degree(self):
        """Degree of the polynomial nonlinearity f (2 for KdV and Ostrovsky)."""
        if self.family is EquationFamily.GENERALIZED_KDV:
            return self.p
        return 2

    def to_dict(self):
        data = {
            'family': self.family.value,
            'alpha': self.alpha,
            'beta': self.beta,
        }
        if self.family is EquationFamily.GENERALIZED_KDV:
            data['p'] = self.p
        if self.family is EquationFamily.OSTROVSKY:
            data['gamma'] = self.gamma
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(
            family=data['family'],
            alpha=data['alpha'],
            beta=data['beta'],
            p=data.get('p', 2),
            gamma=data.get('gamma', 0.0),
        )
