# gecl/domain/coefficient.py
"""
The propagation speed a(t) = λ(t)·ω(t).
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..utils.jets import Jet
from .perturbation import PerturbationProfile
from .scales import ScaleSet
from .shape import ShapeFunction


@dataclass(frozen=True)
class Coefficient:
    """
    Speed coefficient bundling shape, perturbation and scale set.

    Attributes:
        shape: Shape function λ
        perturbation: Oscillating factor ω (identity for ω ≡ 1)
        scales: Θ, Ξ, m, N
    """
    shape: ShapeFunction
    scales: ScaleSet
    perturbation: PerturbationProfile = field(default_factory=PerturbationProfile.identity)

    @property
    def m_max(self) -> int:
        return min(self.shape.m_max, self.perturbation.bump.smoothness_order)

    @property
    def has_perturbation(self) -> bool:
        return not self.perturbation.is_identity

    def value(self, t: float) -> float:
        """a(t) for scalar t."""
        return self.shape.value(t) * self.perturbation.value(t)

    def eval(self, t) -> np.ndarray:
        """a(t) for array input."""
        return self.shape.eval(t) * self.perturbation.eval(t)

    def jet(self, t, order: int) -> Jet:
        """Jet of a; the product of jets is the Leibniz rule."""
        if order > self.m_max:
            raise ValueError(f"derivative order {order} exceeds oracle order {self.m_max}")
        return self.shape.jet(t, order) * self.perturbation.jet(t, order)

    def deriv(self, t, k: int) -> np.ndarray:
        """d_t^k a(t)."""
        return self.jet(t, k).derivative_value(k)

    def lambda_only(self) -> "Coefficient":
        """The same shape and scales with ω ≡ 1."""
        return Coefficient(shape=self.shape, scales=self.scales)

    def breakpoints(self) -> List[float]:
        """Times where the integrator should land exactly."""
        pts = list(self.perturbation.breakpoints())
        if self.shape.regular_from > 0:
            pts.append(self.shape.regular_from)
        return sorted(pts)

    def describe(self) -> str:
        kind = self.perturbation.kind.value
        return f"a(t) = {self.shape.describe()} · ω[{kind}]"
