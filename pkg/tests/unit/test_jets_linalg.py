"""
Unit tests for the Taylor-jet arithmetic and the closed-form 2×2 linear algebra.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gecl.utils.jets import Jet
from gecl.utils.linalg import (
    SingularMatrixError,
    condition,
    det2,
    eigenvalues2,
    inverse2,
    singular_values,
    spectral_norm,
)

entries = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)


@st.composite
def complex_matrices(draw):
    values = [complex(draw(entries), draw(entries)) for _ in range(4)]
    return np.array(values, dtype=complex).reshape(2, 2)


class TestJet:
    """Tests for jet arithmetic."""

    def test_variable_has_unit_derivative(self):
        tj = Jet.variable(np.array([0.5, 2.0]), 3)
        np.testing.assert_allclose(tj.derivative_value(1), [1.0, 1.0])
        np.testing.assert_allclose(tj.derivative_value(2), [0.0, 0.0])

    def test_product_rule(self):
        t = np.array([0.3, 1.7])
        tj = Jet.variable(t, 3)
        f = tj.exp() * tj.log()
        # (e^t log t)'' = e^t (log t + 2/t − 1/t²)
        expected = np.exp(t) * (np.log(t) + 2.0 / t - 1.0 / t ** 2)
        np.testing.assert_allclose(f.derivative_value(2), expected, rtol=1e-12)

    def test_reciprocal(self):
        t = np.array([1.0, 4.0])
        inv = 1.0 / (1.0 + Jet.variable(t, 3))
        np.testing.assert_allclose(inv.derivative_value(3), -6.0 / (1.0 + t) ** 4, rtol=1e-12)

    def test_fractional_power(self):
        t = np.array([0.0, 9.0])
        f = (1.0 + Jet.variable(t, 2)) ** 0.5
        np.testing.assert_allclose(f.derivative_value(2), -0.25 * (1.0 + t) ** -1.5, rtol=1e-12)

    def test_from_derivatives_roundtrip(self):
        jet = Jet.from_derivatives([2.0, 3.0, 4.0, 5.0])
        np.testing.assert_allclose(jet.derivatives(), [2.0, 3.0, 4.0, 5.0])

    def test_derivative_lowers_order(self):
        jet = Jet.variable(np.array([2.0]), 3) ** 3
        d = jet.derivative()
        assert d.order == 2
        np.testing.assert_allclose(d.value, [12.0])

    def test_missing_derivative_raises(self):
        with pytest.raises(ValueError, match="no derivative"):
            Jet.variable(np.array([1.0]), 1).derivative_value(2)

    def test_mixed_orders_truncate(self):
        a = Jet.variable(np.array([1.0]), 4)
        b = Jet.variable(np.array([1.0]), 2)
        assert (a * b).order == 2

    @settings(max_examples=40, deadline=None)
    @given(st.floats(min_value=0.1, max_value=5.0), st.floats(min_value=0.1, max_value=5.0))
    def test_log_inverts_exp(self, t, c):
        jet = (Jet.variable(np.array([t]), 4) * c).exp().log()
        np.testing.assert_allclose(jet.derivatives()[:, 0], [c * t, c, 0.0, 0.0, 0.0], atol=1e-9)


class TestLinalg:
    """Tests for the 2×2 helpers."""

    def test_rotation_singular_values(self):
        theta = 0.7
        R = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
        smax, smin = singular_values(R)
        assert float(smax) == pytest.approx(1.0)
        assert float(smin) == pytest.approx(1.0)

    def test_inverse_of_singular_matrix_raises(self):
        with pytest.raises(SingularMatrixError):
            inverse2(np.array([[1.0, 2.0], [2.0, 4.0]]))

    def test_condition_number_of_singular_matrix_raises(self):
        assert float(spectral_norm(np.zeros((2, 2)))) == 0.0
        with pytest.raises(SingularMatrixError):
            condition(np.zeros((2, 2)))

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="2, 2"):
            det2(np.eye(3))

    @settings(max_examples=100, deadline=None)
    @given(complex_matrices(), complex_matrices())
    def test_determinant_is_multiplicative(self, A, B):
        scale = max(1.0, abs(complex(det2(A))) * abs(complex(det2(B))))
        assert abs(complex(det2(A @ B)) - complex(det2(A)) * complex(det2(B))) <= 1e-9 * scale * 1e3

    @settings(max_examples=100, deadline=None)
    @given(complex_matrices())
    def test_singular_values_match_numpy(self, M):
        smax, smin = singular_values(M)
        reference = np.linalg.svd(M, compute_uv=False)
        assert float(smax) == pytest.approx(reference[0], rel=1e-7, abs=1e-9)
        assert float(smin) == pytest.approx(reference[1], rel=1e-6, abs=1e-8)

    @settings(max_examples=100, deadline=None)
    @given(complex_matrices())
    def test_inverse(self, M):
        smax, smin = singular_values(M)
        assume(float(smin) > 1e-3 * max(1.0, float(smax)))
        np.testing.assert_allclose(inverse2(M) @ M, np.eye(2), atol=1e-8)

    @settings(max_examples=100, deadline=None)
    @given(complex_matrices())
    def test_eigenvalues_keep_trace_and_determinant(self, M):
        mu = eigenvalues2(M)
        scale = max(1.0, float(np.max(np.abs(M))) ** 2)
        assert abs(mu[0] + mu[1] - (M[0, 0] + M[1, 1])) <= 1e-9 * scale
        assert abs(mu[0] * mu[1] - complex(det2(M))) <= 1e-9 * scale
        assert abs(mu[0]) >= abs(mu[1]) - 1e-12 * scale

    @seed(20240611)
    @settings(max_examples=60, deadline=None)
    @given(arrays(np.float64, (5, 2, 2), elements=entries))
    def test_spectral_norm_of_real_stacks(self, stack):
        np.testing.assert_allclose(spectral_norm(stack), np.linalg.norm(stack, ord=2, axis=(1, 2)),
                                   rtol=1e-7, atol=1e-9)
