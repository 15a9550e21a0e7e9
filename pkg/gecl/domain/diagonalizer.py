# gecl/domain/diagonalizer.py
"""
States of the diagonalization hierarchy in the hyperbolic zone.

After the zero step the system reads D_t − D_k − R_k with
D_k = diag(τ_k⁺, τ_k⁻) and the antidiagonal remainder
R_k = antidiag(β̄_k, β_k) (first row β̄_k, second row β_k, up to the
sign convention fixed by the zero step). All quantities are stored as
Taylor jets in t, so a state carries its own time derivatives up to the
remaining derivative budget.
"""
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from ..utils.jets import Jet


@dataclass(frozen=True)
class SymbolClassTag:
    """
    Symbol class S_N^ℓ{m1, m2, m3}.

    A symbol f belongs to the class when |D_t^k f|·|ξ|^{−m1} λ^{−m2} Ξ^{m3+k}
    stays bounded for k ≤ ℓ.
    """
    m1: float
    m2: float
    m3: float
    ell: int = 0

    @classmethod
    def remainder_class(cls, k: int, m: int) -> "SymbolClassTag":
        """Class of R_k: S_N^{m−k}{1−k, 1−k, k}."""
        return cls(m1=1 - k, m2=1 - k, m3=k, ell=max(m - k, 0))

    def weight(self, xi, lam, Xi, k: int = 0) -> np.ndarray:
        """|ξ|^{−m1} λ^{−m2} Ξ^{m3+k}."""
        xi = np.asarray(xi, dtype=float)
        return xi ** (-self.m1) * np.asarray(lam) ** (-self.m2) * np.asarray(Xi) ** (self.m3 + k)

    def describe(self) -> str:
        return f"S^{self.ell}{{{self.m1:g},{self.m2:g},{self.m3:g}}}"


@dataclass
class DiagonalizerState:
    """
    Level-k data at a batch of points (t, ξ).

    Attributes:
        level: k ≥ 1
        t: Sample times
        xi: Sample frequencies (broadcast against t)
        tau_plus: Jet of τ_k⁺
        tau_minus: Jet of τ_k⁻
        beta: Jet of β_k
        cumulative: Π_{j<k}(I + N^(j)), shape (..., 2, 2); None at level 1
        im_tau_terms: Σ_{j<k} ∂_t d_j/(2(d_j − 1)) (value only)
        h_residual: |R₁₂ − i·conj(β_k)| left by the step that produced this level
    """
    level: int
    t: np.ndarray
    xi: np.ndarray
    tau_plus: Jet
    tau_minus: Jet
    beta: Jet
    cumulative: Optional[np.ndarray] = None
    im_tau_terms: Optional[np.ndarray] = None
    h_residual: Optional[np.ndarray] = None

    @property
    def budget(self) -> int:
        """Remaining derivative order of the jets."""
        return self.beta.order

    @property
    def delta(self) -> Jet:
        """δ_k = τ_k⁺ − τ_k⁻."""
        return self.tau_plus - self.tau_minus

    @property
    def d(self) -> np.ndarray:
        """d_k = |β_k|²/δ_k² (real part of δ_k)."""
        delta = self.delta.value.real
        return np.abs(self.beta.value) ** 2 / delta ** 2

    def d_jet(self) -> Jet:
        """Jet of d_k = |β_k/δ_k|²."""
        u = self.beta / self.delta
        return (u * u.conj()).real

    def n_matrix(self) -> np.ndarray:
        """N^(k) = (i/δ_k)·antidiag(−β̄_k, β_k), shape (..., 2, 2)."""
        delta = self.delta.value
        beta = self.beta.value
        out = np.zeros(np.shape(beta) + (2, 2), dtype=complex)
        out[..., 0, 1] = -1j * np.conj(beta) / delta
        out[..., 1, 0] = 1j * beta / delta
        return out

    def to_rows(self) -> Dict[str, Any]:
        """Column arrays for a per-level CSV."""
        t, xi = np.broadcast_arrays(self.t, self.xi)
        tp = self.tau_plus.value
        tm = self.tau_minus.value
        return {
            'k': np.full(t.shape, self.level),
            't': t,
            'xi': xi,
            're_tau_plus': tp.real,
            'im_tau_plus': tp.imag,
            're_tau_minus': tm.real,
            'im_tau_minus': tm.imag,
            'abs_beta': np.abs(self.beta.value),
            'd': self.d,
        }
