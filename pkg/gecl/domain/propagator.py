# gecl/domain/propagator.py
"""
First-order Fourier-mode system and samples of its fundamental solution.

For V = (λ(t)|ξ|û, D_tû), D_t = −i∂_t, the wave equation becomes
D_tV = A(t,ξ)V with

    A(t,ξ) = [[D_tλ/λ, λ|ξ|], [λω²|ξ|, 0]],

so ∂_tV = iA V. The ``balanced`` form uses W = (|ξ|û, D_tû) instead,
whose generator needs no derivative of λ.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional

import numpy as np

from ..utils.linalg import det2, spectral_norm
from .coefficient import Coefficient

RHS = Callable[[float, np.ndarray], np.ndarray]


class SystemForm(str, Enum):
    """Choice of unknowns for the first-order system."""
    ENERGY = "energy"       # V = (λ|ξ|û, D_tû)
    BALANCED = "balanced"   # W = (|ξ|û, D_tû)


@dataclass(frozen=True)
class SystemMatrix:
    """
    Builder for A(t,ξ) and for the right-hand side of ∂_tY = iA(t,ξ)Y.

    Attributes:
        coefficient: Speed a = λω
        form: Which unknowns the matrix acts on
    """
    coefficient: Coefficient
    form: SystemForm = SystemForm.ENERGY

    def matrix(self, t: float, xi) -> np.ndarray:
        """A(t,ξ) stacked over the frequencies ``xi`` (shape (n, 2, 2))."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        lam = self.coefficient.shape.value(t)
        om = self.coefficient.perturbation.value(t)
        A = np.zeros(xi.shape + (2, 2), dtype=complex)
        if self.form == SystemForm.ENERGY:
            A[..., 0, 0] = -1j * self.coefficient.shape.log_derivative(t)
            A[..., 0, 1] = lam * xi
            A[..., 1, 0] = lam * om * om * xi
        else:
            a = lam * om
            A[..., 0, 1] = xi
            A[..., 1, 0] = a * a * xi
        return A

    def trace(self, t: float) -> complex:
        """tr A = D_tλ/λ (energy form) or 0 (balanced form)."""
        if self.form == SystemForm.ENERGY:
            return -1j * self.coefficient.shape.log_derivative(t)
        return 0.0j

    def rhs(self, xi) -> RHS:
        """
        Right-hand side f(t, Y) = iA(t,ξ)Y for a stack Y of shape (n, 2, k).

        The matrix product is written out entrywise; this is the inner
        loop of every integration.
        """
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        ixi = 1j * xi[:, None]
        shape = self.coefficient.shape
        pert = self.coefficient.perturbation
        energy = self.form == SystemForm.ENERGY

        def f(t: float, Y: np.ndarray) -> np.ndarray:
            lam = shape.value(t)
            om = pert.value(t)
            out = np.empty_like(Y)
            if energy:
                out[:, 0] = shape.log_derivative(t) * Y[:, 0] + (lam * ixi) * Y[:, 1]
                out[:, 1] = (lam * om * om * ixi) * Y[:, 0]
            else:
                a = lam * om
                out[:, 0] = ixi * Y[:, 1]
                out[:, 1] = (a * a * ixi) * Y[:, 0]
            return out

        return f


@dataclass
class PropagatorMatrix:
    """
    One sample of E(t,s,ξ).

    The true matrix is ``entries · exp(log_scale)``; ``log_scale`` stays 0
    unless magnitudes exceeded the renormalisation threshold.

    Attributes:
        entries: 2×2 complex matrix (possibly rescaled)
        s: Initial time
        t: Final time
        xi: Frequency |ξ|
        log_scale: Natural log of the factor removed from ``entries``
        steps_taken: Accepted integrator steps
        rejected_steps: Rejected integrator steps
        est_local_error: Largest accepted local error estimate (scaled)
    """
    entries: np.ndarray
    s: float
    t: float
    xi: float
    log_scale: float = 0.0
    steps_taken: int = 0
    rejected_steps: int = 0
    est_local_error: float = 0.0

    @classmethod
    def identity(cls, s: float, xi: float) -> "PropagatorMatrix":
        """E(s,s,ξ) = I."""
        return cls(entries=np.eye(2, dtype=complex), s=s, t=s, xi=xi)

    @property
    def matrix(self) -> np.ndarray:
        return self.entries * np.exp(self.log_scale)

    @property
    def log_norm(self) -> float:
        return float(np.log(spectral_norm(self.entries)) + self.log_scale)

    @property
    def norm(self) -> float:
        return float(np.exp(self.log_norm))

    @property
    def det(self) -> complex:
        return complex(det2(self.entries) * np.exp(2.0 * self.log_scale))

    def liouville_error(self, log_expected_det: float) -> float:
        """|det E − expected| / expected with the expected determinant given by its log."""
        scaled = det2(self.entries) * np.exp(2.0 * self.log_scale - log_expected_det)
        return float(abs(scaled - 1.0))

    def __matmul__(self, other: "PropagatorMatrix") -> "PropagatorMatrix":
        """Cocycle composition E(t,r)·E(r,s)."""
        return PropagatorMatrix(
            entries=self.entries @ other.entries,
            s=other.s,
            t=self.t,
            xi=self.xi,
            log_scale=self.log_scale + other.log_scale,
            steps_taken=self.steps_taken + other.steps_taken,
            rejected_steps=self.rejected_steps + other.rejected_steps,
            est_local_error=max(self.est_local_error, other.est_local_error),
        )

    def to_row(self, log_expected_det: Optional[float] = None) -> Dict[str, float]:
        E = self.entries
        row = {'s': self.s, 't': self.t, 'xi': self.xi}
        for (i, j), name in (((0, 0), '11'), ((0, 1), '12'), ((1, 0), '21'), ((1, 1), '22')):
            row[f're_{name}'] = float(E[i, j].real)
            row[f'im_{name}'] = float(E[i, j].imag)
        row['log_scale'] = self.log_scale
        row['norm'] = self.norm if self.log_scale == 0.0 else float('nan')
        row['log_norm'] = self.log_norm
        if log_expected_det is not None:
            row['det_err'] = self.liouville_error(log_expected_det)
        row['steps'] = self.steps_taken
        row['rejected'] = self.rejected_steps
        return row


@dataclass
class PropagatorSamples:
    """
    E(t_i, s, ξ_k) for a batch of frequencies at several output times.

    Attributes:
        s: Initial time
        times: Output times, shape (T,)
        xis: Frequencies, shape (n,)
        entries: Rescaled matrices, shape (T, n, 2, 2)
        log_scale: Removed log factors, shape (T, n)
        steps_taken: Accepted steps of the shared integration
        rejected_steps: Rejected steps
        est_local_error: Largest accepted local error estimate
    """
    s: float
    times: np.ndarray
    xis: np.ndarray
    entries: np.ndarray
    log_scale: np.ndarray
    steps_taken: int = 0
    rejected_steps: int = 0
    est_local_error: float = 0.0
    meta: Dict[str, float] = field(default_factory=dict)

    def at(self, i_time: int, i_xi: int) -> PropagatorMatrix:
        return PropagatorMatrix(
            entries=self.entries[i_time, i_xi].copy(),
            s=self.s,
            t=float(self.times[i_time]),
            xi=float(self.xis[i_xi]),
            log_scale=float(self.log_scale[i_time, i_xi]),
            steps_taken=self.steps_taken,
            rejected_steps=self.rejected_steps,
            est_local_error=self.est_local_error,
        )

    def log_norms(self) -> np.ndarray:
        """log ‖E‖, shape (T, n)."""
        return np.log(spectral_norm(self.entries)) + self.log_scale
