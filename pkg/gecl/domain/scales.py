# gecl/domain/scales.py
"""
Auxiliary scales Θ (stabilisation rate) and Ξ (symbol scale).
"""
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from ..config import Family


@dataclass(frozen=True)
class ScaleSet:
    """
    Θ(t), Ξ(t) together with the derivative count m and zone constant N.

    Attributes:
        family: Family the scales were built for
        m: Number of controlled derivatives (>= 1)
        N: Zone constant
        theta_exponent: Polynomial/constant family: Θ = (1+t)^theta_exponent
        xi_exponent: Ξ = (1+t)^xi_exponent (polynomial, suprapolynomial, constant)
        alpha: Suprapolynomial exponent in Θ = (1+t)^{-β} exp(t^α)
        beta: Suprapolynomial Θ prefactor exponent
        theta_rate: Exponential family: Θ = e^{theta_rate·t}
        xi_rate: Exponential family: Ξ = e^{xi_rate·t}
        params: The family parameters as given (for reports)
    """
    family: Family
    m: int
    N: float
    theta_exponent: float = 0.0
    xi_exponent: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    theta_rate: float = 0.0
    xi_rate: float = 0.0
    params: Optional[Dict[str, float]] = None

    def theta(self, t) -> np.ndarray:
        """Θ(t)."""
        t = np.asarray(t, dtype=float)
        if self.family == Family.EXPONENTIAL:
            return np.exp(self.theta_rate * t)
        if self.family == Family.SUPRAPOLYNOMIAL:
            return (1.0 + t) ** (-self.beta) * np.exp(np.maximum(t, 0.0) ** self.alpha)
        return (1.0 + t) ** self.theta_exponent

    def xi(self, t) -> np.ndarray:
        """Ξ(t)."""
        t = np.asarray(t, dtype=float)
        if self.family == Family.EXPONENTIAL:
            return np.exp(self.xi_rate * t)
        return (1.0 + t) ** self.xi_exponent

    def log_theta(self, t) -> np.ndarray:
        """log Θ(t), finite where Θ itself would overflow."""
        t = np.asarray(t, dtype=float)
        if self.family == Family.EXPONENTIAL:
            return self.theta_rate * t
        if self.family == Family.SUPRAPOLYNOMIAL:
            return -self.beta * np.log1p(t) + np.maximum(t, 0.0) ** self.alpha
        return self.theta_exponent * np.log1p(t)

    def to_dict(self) -> Dict[str, float]:
        out = {'family': self.family.value, 'm': self.m, 'N': self.N}
        out.update(self.params or {})
        return out
