# gecl/services/zone_service.py
"""
Zone boundaries t_ξ⁽¹⁾, t_ξ⁽²⁾ and classification of phase-space points.
"""
import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import optimize

from ..domain.coefficient import Coefficient
from ..domain.reports import CheckReport, Verdict
from ..domain.zone import Zone, ZoneBoundaries, ZonePoint
from ..logging_config import get_logger

logger = get_logger('zone_service')

LogScale = Callable[[float], float]

# Largest time searched for a bracket.
T_SEARCH_MAX = 1e12


class BoundaryNotFoundError(Exception):
    """Raised when no bracket for the boundary exists below the search limit."""
    pass


def boundary(log_scale: LogScale, xi: float, N: float, t_max: float = T_SEARCH_MAX) -> Optional[float]:
    """
    Solve scale(t)·ξ = N for an increasing scale given by its logarithm.

    A doubling search brackets the root and ``brentq`` (bisection with
    secant/inverse-quadratic steps) refines it.

    Args:
        log_scale: t ↦ log scale(t)
        xi: Frequency |ξ| > 0
        N: Zone constant > 0
        t_max: Search limit

    Returns:
        The boundary time, or None when scale(0)·ξ >= N

    Raises:
        BoundaryNotFoundError: If scale(t)·ξ < N up to t_max
        ValueError: On non-positive xi or N
    """
    if xi <= 0 or N <= 0:
        raise ValueError(f"boundary needs xi > 0 and N > 0 (xi={xi}, N={N})")
    target = math.log(N / xi)

    def f(t: float) -> float:
        return float(log_scale(t)) - target

    if f(0.0) >= 0.0:
        return None
    lo, hi = 0.0, 1.0
    while f(hi) < 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > t_max:
            raise BoundaryNotFoundError(
                f"scale(t)·xi stays below N={N:g} up to t={t_max:.3g} (xi={xi:.6g})"
            )
    return float(optimize.brentq(f, lo, hi, xtol=1e-14, rtol=4.0 * np.finfo(float).eps, maxiter=500))


class ZoneService:
    """
    Zone geometry for one coefficient.

    Usage:
        zones = ZoneService(coef)
        b = zones.boundaries(0.5)
        zones.classify(3.0, 0.5).zone
    """

    def __init__(self, coefficient: Coefficient, N: Optional[float] = None):
        self.coefficient = coefficient
        self.N = float(N if N is not None else coefficient.scales.N)
        self._cache: Dict[float, ZoneBoundaries] = {}

    def t1(self, xi: float) -> Optional[float]:
        """t_ξ⁽¹⁾ with Λ(t)|ξ| = N."""
        shape = self.coefficient.shape
        return boundary(lambda t: float(shape.log_primitive(t)), xi, self.N)

    def t2(self, xi: float) -> Optional[float]:
        """t_ξ⁽²⁾ with Θ(t)|ξ| = N."""
        scales = self.coefficient.scales
        return boundary(lambda t: float(scales.log_theta(t)), xi, self.N)

    def boundaries(self, xi: float) -> ZoneBoundaries:
        xi = float(xi)
        cached = self._cache.get(xi)
        if cached is None:
            cached = ZoneBoundaries(xi=xi, N=self.N, t1=self.t1(xi), t2=self.t2(xi))
            self._cache[xi] = cached
        return cached

    def classify(self, t: float, xi: float) -> ZonePoint:
        """Pseudo-differential zone is closed at t⁽¹⁾, hyperbolic zone is closed at t⁽²⁾."""
        b = self.boundaries(xi)
        if t >= b.t2_or_zero:
            zone = Zone.HYPERBOLIC
        elif t <= b.t1_or_zero:
            zone = Zone.PSEUDO_DIFFERENTIAL
        else:
            zone = Zone.INTERMEDIATE
        return ZonePoint(t=float(t), xi=xi, zone=zone)

    def residuals(self, b: ZoneBoundaries) -> Dict[str, float]:
        """Relative residuals Λ(t⁽¹⁾)|ξ|/N − 1 and Θ(t⁽²⁾)|ξ|/N − 1."""
        out = {}
        if b.t1 is not None:
            out['t1_residual'] = math.expm1(float(self.coefficient.shape.log_primitive(b.t1)) + math.log(b.xi / b.N))
        if b.t2 is not None:
            out['t2_residual'] = math.expm1(float(self.coefficient.scales.log_theta(b.t2)) + math.log(b.xi / b.N))
        return out

    def boundary_rows(self, xis: Sequence[float]) -> List[Dict[str, float]]:
        rows = []
        for xi in xis:
            b = self.boundaries(xi)
            row = {'xi': float(xi), 'N': self.N, 't1': b.t1_or_zero, 't2': b.t2_or_zero,
                   'gap': b.t2_or_zero - b.t1_or_zero}
            row.update(self.residuals(b))
            rows.append(row)
        return rows

    def check_geometry(self, xis: Sequence[float], tol: float = 1e-8) -> CheckReport:
        """
        Residuals, ordering t⁽¹⁾ ≤ t⁽²⁾ and monotonicity in |ξ| over a frequency grid.
        """
        xis = np.sort(np.asarray(xis, dtype=float))
        rows = self.boundary_rows(xis)
        t1 = np.array([r['t1'] for r in rows])
        t2 = np.array([r['t2'] for r in rows])
        worst_residual = max(
            [abs(r.get('t1_residual', 0.0)) for r in rows] + [abs(r.get('t2_residual', 0.0)) for r in rows]
        )
        ordered = bool(np.all(t1 <= t2 + 1e-12 * (1.0 + t2)))
        monotone = bool(np.all(np.diff(t1) <= 1e-12 * (1.0 + t1[:-1]))
                        and np.all(np.diff(t2) <= 1e-12 * (1.0 + t2[:-1])))
        status = Verdict.PASS if (worst_residual <= tol and ordered and monotone) else Verdict.FAIL
        notes = []
        if not ordered:
            notes.append("t1 > t2 for some frequency: Θ exceeds Λ somewhere")
        if not monotone:
            notes.append("boundaries are not non-increasing in |ξ|")
        return CheckReport(
            name='zones',
            status=status,
            metrics={
                'worst_residual': worst_residual,
                'ordered': ordered,
                'monotone': monotone,
                'nonempty_gaps': int(np.sum(t2 > t1)),
            },
            rows=rows,
            notes=notes,
        )
