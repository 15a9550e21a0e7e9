# gecl/domain/shape.py
"""
Shape functions λ(t): the monotone, oscillation-free factor of the speed.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate

from ..config import Family
from ..utils.jets import Jet


@dataclass(frozen=True)
class ShapeFunction:
    """
    Analytic shape function with its primitive Λ(t) = 1 + ∫₀ᵗ λ.

    Attributes:
        family: Which analytic family λ belongs to
        p: Polynomial exponent (polynomial family only)
        alpha: Exponent of exp(t^α) (suprapolynomial family only)
        m_max: Highest derivative order served by ``deriv``/``jet``
        regular_from: Derivatives are only finite for t > regular_from
            (0 except for the suprapolynomial family, whose derivatives
            blow up at t = 0)
    """
    family: Family
    p: float = 0.0
    alpha: float = 0.0
    m_max: int = 4
    regular_from: float = 0.0
    _knots: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    _cumulative: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.family == Family.SUPRAPOLYNOMIAL and self._knots is None:
            knots, cumulative = self._primitive_table()
            object.__setattr__(self, '_knots', knots)
            object.__setattr__(self, '_cumulative', cumulative)

    # -- values ------------------------------------------------------------

    def value(self, t: float) -> float:
        """λ(t) for a scalar t (fast path used inside integrators)."""
        if self.family == Family.POLYNOMIAL:
            return (1.0 + t) ** self.p
        if self.family == Family.EXPONENTIAL:
            return math.exp(t)
        if self.family == Family.SUPRAPOLYNOMIAL:
            return math.exp(t ** self.alpha) if t > 0 else 1.0
        return 1.0

    def log_derivative(self, t: float) -> float:
        """λ'(t)/λ(t) for a scalar t."""
        if self.family == Family.POLYNOMIAL:
            return self.p / (1.0 + t)
        if self.family == Family.EXPONENTIAL:
            return 1.0
        if self.family == Family.SUPRAPOLYNOMIAL:
            return self.alpha * t ** (self.alpha - 1.0) if t > 0 else math.inf
        return 0.0

    def eval(self, t) -> np.ndarray:
        """λ(t) for array input."""
        t = np.asarray(t, dtype=float)
        if self.family == Family.POLYNOMIAL:
            return (1.0 + t) ** self.p
        if self.family == Family.EXPONENTIAL:
            return np.exp(t)
        if self.family == Family.SUPRAPOLYNOMIAL:
            return np.exp(np.maximum(t, 0.0) ** self.alpha)
        return np.ones_like(t)

    def jet(self, t, order: int) -> Jet:
        """Taylor jet of λ at the points t."""
        if order > self.m_max:
            raise ValueError(f"derivative order {order} exceeds m_max={self.m_max}")
        tj = Jet.variable(t, order)
        if self.family == Family.POLYNOMIAL:
            return (1.0 + tj) ** self.p
        if self.family == Family.EXPONENTIAL:
            return tj.exp()
        if self.family == Family.SUPRAPOLYNOMIAL:
            with np.errstate(divide='ignore', invalid='ignore'):
                return (tj ** self.alpha).exp()
        return Jet.constant(1.0, order, tj.value.shape)

    def deriv(self, t, k: int) -> np.ndarray:
        """d_t^k λ(t)."""
        return self.jet(t, k).derivative_value(k)

    # -- log scale ---------------------------------------------------------

    def log_value(self, t) -> np.ndarray:
        """log λ(t), finite where λ itself overflows."""
        t = np.asarray(t, dtype=float)
        if self.family == Family.POLYNOMIAL:
            return self.p * np.log1p(t)
        if self.family == Family.EXPONENTIAL:
            return t.copy()
        if self.family == Family.SUPRAPOLYNOMIAL:
            return np.maximum(t, 0.0) ** self.alpha
        return np.zeros_like(t)

    def log_jet(self, t, order: int) -> Jet:
        """Jet of log λ."""
        tj = Jet.variable(t, order)
        if self.family == Family.POLYNOMIAL:
            return (1.0 + tj).log() * self.p
        if self.family == Family.EXPONENTIAL:
            return tj
        if self.family == Family.SUPRAPOLYNOMIAL:
            with np.errstate(divide='ignore', invalid='ignore'):
                return tj ** self.alpha
        return Jet.constant(0.0, order, tj.value.shape)

    def relative_jet(self, t, order: int) -> Jet:
        """Jet of s ↦ λ(s)/λ(t) at s = t; its derivatives are λ⁽ᵏ⁾(t)/λ(t)."""
        if order > self.m_max:
            raise ValueError(f"derivative order {order} exceeds m_max={self.m_max}")
        lj = self.log_jet(t, order)
        return (lj - lj.value).exp()

    def log_primitive(self, t) -> np.ndarray:
        """log Λ(t); Λ = e^t exactly for the exponential family."""
        t = np.asarray(t, dtype=float)
        if self.family == Family.EXPONENTIAL:
            return t.copy()
        return np.log(self.primitive(t))

    def safe_horizon(self, t_max: float, log_cap: float = 690.0) -> float:
        """Largest t ≤ t_max with log λ(t) ≤ log_cap, so λ(t) stays a finite double."""
        if self.family == Family.EXPONENTIAL:
            return min(t_max, log_cap)
        if self.family == Family.SUPRAPOLYNOMIAL:
            return min(t_max, log_cap ** (1.0 / self.alpha))
        return t_max

    # -- primitive ---------------------------------------------------------

    def primitive(self, t) -> np.ndarray:
        """Λ(t) = 1 + ∫₀ᵗ λ(s) ds."""
        t = np.asarray(t, dtype=float)
        if self.family == Family.POLYNOMIAL:
            return 1.0 + ((1.0 + t) ** (self.p + 1.0) - 1.0) / (self.p + 1.0)
        if self.family == Family.EXPONENTIAL:
            return np.exp(t)
        if self.family == Family.SUPRAPOLYNOMIAL:
            return np.vectorize(self._primitive_scalar, otypes=[float])(t)
        return 1.0 + t

    def _primitive_table(self):
        # knots up to where exp(t^α) still fits a double
        t_cap = 700.0 ** (1.0 / self.alpha)
        knots = np.concatenate([[0.0, 0.5], np.geomspace(1.0, t_cap, 120)])
        pieces = [
            integrate.quad(self._integrand, a, b, epsabs=0.0, epsrel=1e-13, limit=200)[0]
            for a, b in zip(knots[:-1], knots[1:])
        ]
        return knots, np.concatenate([[0.0], np.cumsum(pieces)])

    def _integrand(self, s: float) -> float:
        return math.exp(s ** self.alpha)

    def _primitive_scalar(self, t: float) -> float:
        if t <= 0.0:
            return 1.0
        i = int(np.searchsorted(self._knots, t, side='right')) - 1
        i = min(i, len(self._knots) - 2)
        tail = integrate.quad(self._integrand, self._knots[i], t, epsabs=0.0, epsrel=1e-13, limit=200)[0]
        return 1.0 + self._cumulative[i] + tail

    def describe(self) -> str:
        if self.family == Family.POLYNOMIAL:
            return f"(1+t)^{self.p:g}"
        if self.family == Family.SUPRAPOLYNOMIAL:
            return f"exp(t^{self.alpha:g})"
        if self.family == Family.EXPONENTIAL:
            return "e^t"
        return "1"
