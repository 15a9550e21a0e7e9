# gecl/domain/energy.py
"""
Spectrally given Cauchy data and energy traces.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from ..config import ProfileKind
from .perturbation import BumpProfile


@dataclass(frozen=True)
class CauchyData:
    """
    Radial Cauchy data û₁(|ξ|) = A₁·φ(|ξ|), û₂(|ξ|) = A₂·φ(|ξ|).

    The radial profile φ is a smooth plateau: for the annulus profile it
    rises after ρ_lo and falls before ρ_hi; the ball profile is 1 from
    |ξ| = 0 and only falls before ρ_hi.

    Attributes:
        dimension: Space dimension n
        profile: Annulus or ball profile
        rho_lo: Inner support radius (ignored for the ball profile)
        rho_hi: Outer support radius
        amplitude_u1: A₁
        amplitude_u2: A₂
    """
    dimension: int = 1
    profile: ProfileKind = ProfileKind.ANNULUS
    rho_lo: float = 1.0
    rho_hi: float = 2.0
    amplitude_u1: float = 1.0
    amplitude_u2: float = 1.0
    _plateau: BumpProfile = field(default_factory=lambda: BumpProfile(scale=1.0), repr=False, compare=False)

    @property
    def support(self):
        lo = 0.0 if self.profile == ProfileKind.BALL else self.rho_lo
        return lo, self.rho_hi

    @property
    def has_gap(self) -> bool:
        """0 ∉ supp û."""
        return self.support[0] > 0.0

    def radial(self, rho) -> np.ndarray:
        """φ(ρ)."""
        rho = np.asarray(rho, dtype=float)
        lo, hi = self.support
        if self.profile == ProfileKind.BALL:
            # map [0, hi] so that only the falling edge remains
            s = 0.5 + 0.5 * rho / hi
            inside = rho < hi
            return np.where(inside, self._plateau.eval(np.minimum(s, 1.0)), 0.0)
        s = (rho - lo) / (hi - lo)
        return self._plateau.eval(s)

    def u1_hat(self, rho) -> np.ndarray:
        return self.amplitude_u1 * self.radial(rho)

    def u2_hat(self, rho) -> np.ndarray:
        return self.amplitude_u2 * self.radial(rho)

    def panel_edges(self) -> np.ndarray:
        """Support split where the plateau edges begin and end; φ is smooth on each panel."""
        lo, hi = self.support
        p_lo, p_hi = self._plateau.plateau_lo, self._plateau.plateau_hi
        if self.profile == ProfileKind.BALL:
            return np.array([0.0, hi * (2.0 * p_hi - 1.0), hi])
        return lo + (hi - lo) * np.array([0.0, p_lo, p_hi, 1.0])

    def surface_factor(self) -> float:
        """Area of the unit sphere S^{n−1} (2 for n = 1)."""
        n = self.dimension
        return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dimension': self.dimension,
            'profile': self.profile.value,
            'rho_lo': self.support[0],
            'rho_hi': self.rho_hi,
            'amplitude_u1': self.amplitude_u1,
            'amplitude_u2': self.amplitude_u2,
        }


@dataclass
class EnergyTrace:
    """
    E_λ(t;u) on a time grid, with the ratio to λ(t).

    Attributes:
        times: Sample times
        values: E_λ(t;u)
        lam: λ(t) at the sample times
        data_norm: ‖u₁‖²_{H¹} + ‖u₂‖²_{L²}
    """
    times: np.ndarray
    values: np.ndarray
    lam: np.ndarray
    data_norm: float = float('nan')
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def ratio(self) -> np.ndarray:
        return self.values / self.lam

    @property
    def min_ratio(self) -> float:
        return float(np.min(self.ratio))

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratio))

    @property
    def spread(self) -> float:
        """max_ratio / min_ratio."""
        return self.max_ratio / self.min_ratio if self.min_ratio > 0 else float('inf')

    def to_rows(self) -> List[Dict[str, float]]:
        return [
            {'t': float(t), 'E_lambda': float(e), 'ratio': float(r)}
            for t, e, r in zip(self.times, self.values, self.ratio)
        ]
