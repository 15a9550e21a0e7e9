# gecl/domain/zone.py
"""
Zones of the extended phase space (t, |ξ|).
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional


class Zone(str, Enum):
    """Region of (t, |ξ|) in which one construction of E applies."""
    PSEUDO_DIFFERENTIAL = "pseudo_differential"
    INTERMEDIATE = "intermediate"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class ZoneBoundaries:
    """
    Boundaries t_ξ⁽¹⁾ (Λ(t)|ξ| = N) and t_ξ⁽²⁾ (Θ(t)|ξ| = N) for one frequency.

    A boundary of ``None`` means the scale already reaches N/|ξ| at t = 0,
    i.e. the boundary sits at t = 0.
    """
    xi: float
    N: float
    t1: Optional[float]
    t2: Optional[float]

    @property
    def t1_or_zero(self) -> float:
        return 0.0 if self.t1 is None else self.t1

    @property
    def t2_or_zero(self) -> float:
        return 0.0 if self.t2 is None else self.t2

    @property
    def has_gap(self) -> bool:
        """Intermediate zone is non-empty."""
        return self.t2_or_zero > self.t1_or_zero

    def to_dict(self) -> dict:
        return {'xi': self.xi, 'N': self.N, 't1': self.t1, 't2': self.t2}


@dataclass(frozen=True)
class ZonePoint:
    """
    A classified point of phase space.

    Attributes:
        t: Time >= 0
        xi: Frequency magnitude > 0
        zone: Zone the point belongs to
    """
    t: float
    xi: float
    zone: Zone
