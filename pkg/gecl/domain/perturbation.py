# gecl/domain/perturbation.py
"""
Bump profiles ψ and the oscillating factor ω(t) built from them.

The bump is a smoothed indicator of a plateau [lo, hi] ⊂ [0, 1], made from
the non-analytic transition T(x) = φ(x) / (φ(x) + φ(1−x)) with
φ(x) = exp(−1/x) for x > 0 and φ = 0 otherwise, then scaled so that
∫₀¹ |ψ| = 1/2.
"""
import bisect
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from ..utils.jets import Jet

# Below this distance from 0 (or 1) the transition equals 0 (or 1) to
# double precision, together with all its derivatives.
_FLAT_EDGE = 1e-3


def _transition_scalar(x: float) -> float:
    if x <= _FLAT_EDGE:
        return 0.0
    if x >= 1.0 - _FLAT_EDGE:
        return 1.0
    f = math.exp(-1.0 / x)
    g = math.exp(-1.0 / (1.0 - x))
    return f / (f + g)


def _transition_array(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    xs = np.clip(x, _FLAT_EDGE, 1.0 - _FLAT_EDGE)
    f = np.exp(-1.0 / xs)
    g = np.exp(-1.0 / (1.0 - xs))
    out = f / (f + g)
    out = np.where(x <= _FLAT_EDGE, 0.0, out)
    return np.where(x >= 1.0 - _FLAT_EDGE, 1.0, out)


def _transition_jet(xj: Jet) -> Jet:
    x = xj.value
    inside = (x > _FLAT_EDGE) & (x < 1.0 - _FLAT_EDGE)
    safe = Jet(xj.coeffs.copy())
    safe.coeffs[0] = np.clip(x, _FLAT_EDGE, 1.0 - _FLAT_EDGE)
    f = (-1.0 / safe).exp()
    g = (-1.0 / (1.0 - safe)).exp()
    mid = f / (f + g)
    outer = Jet.constant(np.where(x >= 1.0 - _FLAT_EDGE, 1.0, 0.0), xj.order, x.shape)
    return mid.where(inside, outer)


@dataclass(frozen=True)
class BumpProfile:
    """
    Plateau bump ψ = c·T(s/lo)·T((1−s)/(1−hi)) supported in [0, 1].

    Attributes:
        scale: Normalisation constant c (plateau value)
        plateau_lo: Left end of the plateau
        plateau_hi: Right end of the plateau
        smoothness_order: Highest derivative order served by the jet oracle
    """
    scale: float
    plateau_lo: float = 0.1
    plateau_hi: float = 0.9
    smoothness_order: int = 4

    @classmethod
    def zero(cls, smoothness_order: int = 4) -> "BumpProfile":
        """The null profile ψ ≡ 0."""
        return cls(scale=0.0, smoothness_order=smoothness_order)

    @property
    def is_zero(self) -> bool:
        return self.scale == 0.0

    def shape_scalar(self, s: float) -> float:
        """Unscaled plateau P(s) for scalar s."""
        if s <= 0.0 or s >= 1.0:
            return 0.0
        return (_transition_scalar(s / self.plateau_lo)
                * _transition_scalar((1.0 - s) / (1.0 - self.plateau_hi)))

    def value(self, s: float) -> float:
        """ψ(s) for scalar s."""
        return self.scale * self.shape_scalar(s)

    def eval(self, s) -> np.ndarray:
        """ψ(s) for array input."""
        s = np.asarray(s, dtype=float)
        shape = (_transition_array(s / self.plateau_lo)
                 * _transition_array((1.0 - s) / (1.0 - self.plateau_hi)))
        shape = np.where((s <= 0.0) | (s >= 1.0), 0.0, shape)
        return self.scale * shape

    def jet(self, sj: Jet) -> Jet:
        """Jet of ψ composed with the jet ``sj``."""
        if sj.order > self.smoothness_order:
            raise ValueError(
                f"bump oracle serves {self.smoothness_order} derivatives, {sj.order} requested"
            )
        left = _transition_jet(sj / self.plateau_lo)
        right = _transition_jet((1.0 - sj) / (1.0 - self.plateau_hi))
        return (left * right) * self.scale

    def deriv(self, s, k: int) -> np.ndarray:
        """d^k ψ / ds^k."""
        return self.jet(Jet.variable(s, k)).derivative_value(k)

    # periodisation b(s) = ψ(s mod 1)

    def periodic_value(self, s: float) -> float:
        return self.value(s - math.floor(s))

    def periodic_jet(self, sj: Jet) -> Jet:
        shifted = Jet(sj.coeffs.copy())
        shifted.coeffs[0] = sj.value - np.floor(sj.value)
        return self.jet(shifted)

    def bounds(self) -> Tuple[float, float]:
        """(min ψ, max ψ) over [0, 1]."""
        return (min(0.0, self.scale), max(0.0, self.scale))

    def log_derivative_sup(self, samples: int = 20001) -> float:
        """c = sup |b'| / (1 + b) over one period."""
        if self.is_zero:
            return 0.0
        s = np.linspace(0.0, 1.0, samples)
        return float(np.max(np.abs(self.deriv(s, 1)) / (1.0 + self.eval(s))))


class PerturbationKindTag(str, Enum):
    """How ω behaves inside a packet."""
    IDENTITY = "identity"
    ADMISSIBLE = "admissible"
    COUNTEREXAMPLE = "counterexample"


@dataclass(frozen=True)
class PerturbationProfile:
    """
    Oscillating factor ω(t), equal to 1 outside the packets [t_j, t_j+δ_j].

    Admissible kind: ω = 1 + η_j ψ((t−t_j)/δ_j).
    Counterexample kind: ω = 1 + b(ν_j (t−t_j)/δ_j) with b(s) = ψ(s mod 1).

    Attributes:
        kind: Identity, admissible or counterexample
        t_seq: Packet starts t_j (j = first_index, first_index+1, ...)
        delta_seq: Packet lengths δ_j
        eta_seq: Amplitudes η_j (admissible kind)
        nu_seq: Period counts ν_j (counterexample kind)
        bump: The bump profile ψ
        first_index: Index j of the first packet
        epsilon: ε used to generate ν_j (counterexample kind)
        sigma: σ used to generate the sequences (counterexample kind)
    """
    kind: PerturbationKindTag
    t_seq: Tuple[float, ...] = ()
    delta_seq: Tuple[float, ...] = ()
    eta_seq: Tuple[float, ...] = ()
    nu_seq: Tuple[int, ...] = ()
    bump: BumpProfile = field(default_factory=BumpProfile.zero)
    first_index: int = 1
    epsilon: float = 0.0
    sigma: float = 0.0

    @classmethod
    def identity(cls) -> "PerturbationProfile":
        """ω ≡ 1."""
        return cls(kind=PerturbationKindTag.IDENTITY)

    @property
    def is_identity(self) -> bool:
        return self.kind == PerturbationKindTag.IDENTITY or not self.t_seq

    @property
    def packets(self) -> List[Tuple[float, float]]:
        """[(t_j, t_j+δ_j), ...]."""
        return [(t, t + d) for t, d in zip(self.t_seq, self.delta_seq)]

    def packet_for(self, j: int) -> Tuple[float, float]:
        i = j - self.first_index
        return self.t_seq[i], self.t_seq[i] + self.delta_seq[i]

    def index_of(self, j: int) -> int:
        return j - self.first_index

    def breakpoints(self) -> List[float]:
        pts: List[float] = []
        for start, end in self.packets:
            pts.extend((start, end))
        return pts

    def _local(self, i: int, t: float) -> float:
        s = (t - self.t_seq[i]) / self.delta_seq[i]
        if self.kind == PerturbationKindTag.ADMISSIBLE:
            return self.eta_seq[i] * self.bump.value(s)
        if s >= 1.0:
            return 0.0
        return self.bump.periodic_value(self.nu_seq[i] * s)

    def value(self, t: float) -> float:
        """ω(t) for scalar t."""
        if self.is_identity:
            return 1.0
        i = bisect.bisect_right(self.t_seq, t) - 1
        if i < 0 or t >= self.t_seq[i] + self.delta_seq[i]:
            return 1.0
        return 1.0 + self._local(i, t)

    def _packet_indices(self, t: np.ndarray) -> np.ndarray:
        starts = np.asarray(self.t_seq)
        i = np.searchsorted(starts, t, side='right') - 1
        inside = i >= 0
        ic = np.clip(i, 0, len(starts) - 1)
        inside &= t < starts[ic] + np.asarray(self.delta_seq)[ic]
        return np.where(inside, ic, -1)

    def eval(self, t) -> np.ndarray:
        """ω(t) for array input."""
        t = np.asarray(t, dtype=float)
        if self.is_identity:
            return np.ones_like(t)
        return self.jet(t, 0).value

    def jet(self, t, order: int) -> Jet:
        """Taylor jet of ω at the points t."""
        t = np.asarray(t, dtype=float)
        if self.is_identity:
            return Jet.constant(1.0, order, t.shape)
        idx = self._packet_indices(t)
        ic = np.maximum(idx, 0)
        starts = np.asarray(self.t_seq)[ic]
        lengths = np.asarray(self.delta_seq)[ic]
        sj = (Jet.variable(t, order) - starts) / lengths
        if self.kind == PerturbationKindTag.ADMISSIBLE:
            local = self.bump.jet(sj) * np.asarray(self.eta_seq)[ic]
        else:
            nu = np.asarray(self.nu_seq, dtype=float)[ic]
            local = self.bump.periodic_jet(sj * nu)
        zero = Jet.constant(0.0, order, t.shape)
        return local.where(idx >= 0, zero) + 1.0

    def deriv(self, t, k: int) -> np.ndarray:
        """d_t^k ω(t)."""
        return self.jet(t, k).derivative_value(k)

    def bounds(self) -> Tuple[float, float]:
        """(c1, c2) with c1 ≤ ω ≤ c2."""
        lo, hi = self.bump.bounds()
        if self.is_identity:
            return 1.0, 1.0
        if self.kind == PerturbationKindTag.ADMISSIBLE:
            eta = max(self.eta_seq) if self.eta_seq else 0.0
            return 1.0 + eta * lo, 1.0 + eta * hi
        return 1.0 + lo, 1.0 + hi

