# gecl/domain/floquet.py
"""
Value types of the periodic Hill system and of the counterexample runs.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np


class PhaseClass(str, Enum):
    """Where the monodromy eigenvalues sit in the complex plane."""
    UNIT_CIRCLE = "unit_circle"
    REAL = "real"
    IMAGINARY = "imaginary"
    COMPLEX = "complex"


def classify_phase(mu: complex, rel_tol: float = 1e-6) -> PhaseClass:
    """Phase class of one eigenvalue."""
    modulus = abs(mu)
    if abs(modulus - 1.0) <= rel_tol:
        return PhaseClass.UNIT_CIRCLE
    if abs(mu.imag) <= rel_tol * modulus:
        return PhaseClass.REAL
    if abs(mu.real) <= rel_tol * modulus:
        return PhaseClass.IMAGINARY
    return PhaseClass.COMPLEX


@dataclass
class MonodromyResult:
    """
    Monodromy X(λ̃) of the Hill system over one period.

    Attributes:
        lambda_tilde: Parameter λ̃ > 0
        X: 2×2 complex monodromy matrix
        eigenvalues: Eigenvalues ordered by decreasing modulus
        unstable: max |eigenvalue| > 1 + margin
        det_error: |det X − 1|
    """
    lambda_tilde: float
    X: np.ndarray
    eigenvalues: np.ndarray
    unstable: bool
    det_error: float = 0.0

    @property
    def max_modulus(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    @property
    def trace(self) -> complex:
        return complex(self.X[0, 0] + self.X[1, 1])

    @property
    def phase_class(self) -> PhaseClass:
        return classify_phase(complex(self.eigenvalues[0]))

    def to_row(self) -> Dict[str, Any]:
        tr = self.trace
        return {
            'lambda_tilde': self.lambda_tilde,
            'tr_re': tr.real,
            'tr_im': tr.imag,
            'max_modulus': self.max_modulus,
            'det_err': self.det_error,
            'unstable': self.unstable,
            'phase_class': self.phase_class.value,
        }


@dataclass(frozen=True)
class InstabilityInterval:
    """
    Shrunk instability interval of the Hill system.

    Attributes:
        lo: Left end after shrinking
        hi: Right end after shrinking
        mu_min: Smallest max-modulus over the interior test points
        raw_lo: Left end before shrinking
        raw_hi: Right end before shrinking
        phase_class: Eigenvalue class at the midpoint
    """
    lo: float
    hi: float
    mu_min: float
    raw_lo: float = float('nan')
    raw_hi: float = float('nan')
    phase_class: PhaseClass = PhaseClass.REAL

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lo': self.lo,
            'hi': self.hi,
            'mu_min': self.mu_min,
            'raw_lo': self.raw_lo,
            'raw_hi': self.raw_hi,
            'phase_class': self.phase_class.value,
        }


@dataclass
class AmplificationRun:
    """
    One packet of the counterexample: E(t_j+δ_j, t_j, ξ) for ξ ∈ Ω_j.

    Attributes:
        j: Packet index
        nu: Number of bump periods ν_j in the packet
        xis: Sample frequencies in Ω_j
        lambda_tildes: δ_jλ(t_j)ξ/ν_j for each frequency
        log_modulus: log of the largest eigenvalue modulus per frequency
        log_bound: ν_j log μ − log 2
        log_energy_gain: log of ‖E‖² per frequency
        log_normalised_energy: log of ‖E‖²·λ(t_j)/λ(t_j+δ_j) per frequency
        hypothesis_ratio: δ_jλ(t_j)/Λ(t_j)
        period_deviation: max_k ‖Y_j(k+1,k) − X(λ̃)‖ per frequency
        period_spread: max_k ‖Y_j(k+1,k) − Y_j(1,0)‖ per frequency
    """
    j: int
    nu: int
    xis: np.ndarray
    lambda_tildes: np.ndarray
    log_modulus: np.ndarray
    log_bound: float
    log_energy_gain: np.ndarray
    log_normalised_energy: np.ndarray
    hypothesis_ratio: float = float('nan')
    period_deviation: Optional[np.ndarray] = None
    period_spread: Optional[np.ndarray] = None

    @property
    def passed(self) -> bool:
        """Eigenvalue bound μ^{ν_j}/2 holds at every sampled frequency."""
        return bool(np.all(self.log_modulus >= self.log_bound))

    @property
    def growth_rate(self) -> np.ndarray:
        """log(modulus)/ν_j per frequency."""
        return self.log_modulus / self.nu

    def beats_ceiling(self, ceiling: float, factor: float = 2.0) -> bool:
        return bool(np.all(self.log_normalised_energy >= np.log(factor * ceiling)))

    def to_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for i, xi in enumerate(self.xis):
            row = {
                'j': self.j,
                'nu': self.nu,
                'xi': float(xi),
                'lambda_tilde': float(self.lambda_tildes[i]),
                'log_modulus': float(self.log_modulus[i]),
                'log_bound': self.log_bound,
                'log_energy_gain': float(self.log_energy_gain[i]),
                'log_normalised_energy': float(self.log_normalised_energy[i]),
                'pass': bool(self.log_modulus[i] >= self.log_bound),
                'hypothesis_ratio': self.hypothesis_ratio,
            }
            if self.period_deviation is not None:
                row['period_deviation'] = float(self.period_deviation[i])
            if self.period_spread is not None:
                row['period_spread'] = float(self.period_spread[i])
            rows.append(row)
        return rows


@dataclass
class BlowupReport:
    """
    The Cauchy-data blow-up sequence log s_j and its verdict.

    Attributes:
        j: Packet indices
        log_terms: log s_j for each index
        c: sup |b'|/(1+b)
        log_mu: log μ of the instability interval
        S: sup_j λ(t_j+δ_j)/λ(t_j)
        criterion: Left-hand side of the closed-form criterion (when available)
        decreasing: log s_j strictly decreasing over the tail
        tends_to_zero: last log s_j well below the first
    """
    j: List[int]
    log_terms: List[float]
    c: float
    log_mu: float
    S: float
    criterion: Optional[float] = None
    decreasing: bool = False
    tends_to_zero: bool = False
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def contradiction(self) -> bool:
        return self.decreasing and self.tends_to_zero

    def to_rows(self) -> List[Dict[str, Any]]:
        return [{'j': j, 'log_term': v} for j, v in zip(self.j, self.log_terms)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'c': self.c,
            'log_mu': self.log_mu,
            'S': self.S,
            'criterion': self.criterion,
            'decreasing': self.decreasing,
            'tends_to_zero': self.tends_to_zero,
            'contradiction': self.contradiction,
            **self.extra,
        }
