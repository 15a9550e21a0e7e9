# gecl/utils/linalg.py
"""
Closed-form linear algebra for (stacks of) 2×2 complex matrices.

All functions accept an array of shape (..., 2, 2) and operate on the
trailing two axes, so a whole frequency batch is handled in one call.
"""
import numpy as np


class SingularMatrixError(Exception):
    """Raised when an operation needs an invertible matrix but det M = 0."""
    pass


def _as_stack(M) -> np.ndarray:
    arr = np.asarray(M, dtype=complex)
    if arr.shape[-2:] != (2, 2):
        raise ValueError(f"expected (..., 2, 2) array, got shape {arr.shape}")
    return arr


def det2(M) -> np.ndarray:
    """Determinant of each 2×2 block."""
    M = _as_stack(M)
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


def trace2(M) -> np.ndarray:
    """Trace of each 2×2 block."""
    M = _as_stack(M)
    return M[..., 0, 0] + M[..., 1, 1]


def singular_values(M):
    """
    Both singular values of each block.

    Uses σ₁ ± σ₂ = √(‖M‖_F² ± 2|det M|), which avoids the cancellation
    of the textbook formula for nearly singular matrices.

    Returns:
        Tuple (sigma_max, sigma_min) of real arrays
    """
    M = _as_stack(M)
    frob2 = np.sum(np.abs(M) ** 2, axis=(-2, -1))
    abs_det = np.abs(det2(M))
    plus = np.sqrt(frob2 + 2.0 * abs_det)
    minus = np.sqrt(np.maximum(frob2 - 2.0 * abs_det, 0.0))
    sigma_max = 0.5 * (plus + minus)
    with np.errstate(divide='ignore', invalid='ignore'):
        sigma_min = np.where(sigma_max > 0, abs_det / sigma_max, 0.0)
    return sigma_max, sigma_min


def spectral_norm(M):
    """Largest singular value ‖M‖ of each block."""
    return singular_values(M)[0]


def condition(M):
    """
    Spectral condition number ‖M‖·‖M⁻¹‖.

    Raises:
        SingularMatrixError: If any block is singular
    """
    sigma_max, sigma_min = singular_values(M)
    if np.any(sigma_min <= 0.0):
        raise SingularMatrixError("condition number undefined for a singular matrix")
    return sigma_max / sigma_min


def inverse2(M) -> np.ndarray:
    """Inverse of each block via the adjugate."""
    M = _as_stack(M)
    det = det2(M)
    if np.any(det == 0):
        raise SingularMatrixError("matrix is singular")
    inv = np.empty_like(M)
    inv[..., 0, 0] = M[..., 1, 1]
    inv[..., 1, 1] = M[..., 0, 0]
    inv[..., 0, 1] = -M[..., 0, 1]
    inv[..., 1, 0] = -M[..., 1, 0]
    return inv / det[..., None, None]


def eigenvalues2(M):
    """
    Eigenvalues from the characteristic polynomial μ² − tr·μ + det.

    The larger-modulus root is computed first and the second one as
    det/μ₁, so the pair keeps its product even when one root is tiny.

    Returns:
        Array of shape (..., 2), ordered by decreasing modulus
    """
    M = _as_stack(M)
    half_tr = 0.5 * trace2(M)
    det = det2(M)
    root = np.sqrt(half_tr * half_tr - det)
    # pick the sign that avoids cancellation
    flip = np.real(np.conj(half_tr) * root) < 0
    root = np.where(flip, -root, root)
    mu1 = half_tr + root
    with np.errstate(divide='ignore', invalid='ignore'):
        mu2 = np.where(mu1 != 0, det / mu1, half_tr - root)
    return np.stack([mu1, mu2], axis=-1)

