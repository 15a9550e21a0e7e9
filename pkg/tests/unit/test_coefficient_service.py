"""
Unit tests for the coefficient construction.

Tests shape functions, scale windows, the bump profile and both kinds of
perturbation.
"""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from gecl.config import CoefficientConfig, Family, PerturbationKind
from gecl.services.coefficient_service import (
    AdmissibilityError,
    CoefficientService,
    ShapeParameterError,
    admissible_sequences,
    counterexample_sequences,
    hypothesis_ratios,
    lower_xi_exponent,
    make_bump,
    make_scale_set,
    make_shape,
)


@pytest.fixture(scope="module")
def bump():
    return make_bump()


class TestShapes:
    """Tests for make_shape and the analytic families."""

    def test_polynomial_value_and_primitive(self):
        shape = make_shape(Family.POLYNOMIAL, {'p': 2.0})
        assert shape.value(1.0) == pytest.approx(4.0)
        assert float(shape.primitive(1.0)) == pytest.approx(10.0 / 3.0)
        assert float(shape.primitive(0.0)) == pytest.approx(1.0)

    def test_exponential_primitive_equals_lambda(self):
        shape = make_shape(Family.EXPONENTIAL)
        t = np.array([0.0, 1.0, 5.0])
        np.testing.assert_allclose(shape.primitive(t), np.exp(t))

    def test_suprapolynomial_primitive_matches_quadrature(self):
        shape = make_shape(Family.SUPRAPOLYNOMIAL, {'alpha': 0.5})
        expected = 1.0 + integrate.quad(lambda s: math.exp(math.sqrt(s)), 0.0, 30.0, epsrel=1e-12)[0]
        assert float(shape.primitive(30.0)) == pytest.approx(expected, rel=1e-10)
        assert shape.regular_from == 1.0

    def test_constant_shape(self):
        shape = make_shape(Family.CONSTANT)
        assert shape.value(7.0) == 1.0
        assert float(shape.primitive(7.0)) == pytest.approx(8.0)

    @pytest.mark.parametrize("p", [0.0, -1.0])
    def test_rejects_non_positive_p(self, p):
        with pytest.raises(ShapeParameterError, match="p > 0"):
            make_shape(Family.POLYNOMIAL, {'p': p})

    @pytest.mark.parametrize("alpha", [0.0, 1.0, 1.5])
    def test_rejects_alpha_outside_unit_interval(self, alpha):
        with pytest.raises(ShapeParameterError, match="alpha"):
            make_shape(Family.SUPRAPOLYNOMIAL, {'alpha': alpha})

    def test_jet_matches_closed_form_derivatives(self):
        shape = make_shape(Family.POLYNOMIAL, {'p': 2.5})
        t = np.array([0.0, 3.0, 40.0])
        np.testing.assert_allclose(shape.deriv(t, 1), 2.5 * (1.0 + t) ** 1.5)
        np.testing.assert_allclose(shape.deriv(t, 2), 2.5 * 1.5 * (1.0 + t) ** 0.5)

    def test_jet_order_above_m_max_raises(self):
        shape = make_shape(Family.POLYNOMIAL, {'p': 2.0}, m_max=2)
        with pytest.raises(ValueError, match="m_max"):
            shape.jet(np.array([1.0]), 3)


class TestScaleSet:
    """Tests for the admissibility windows of Θ and Ξ."""

    def test_polynomial_lower_xi_exponent(self):
        assert lower_xi_exponent(Family.POLYNOMIAL, 2, p=2.0, q=1.0) == pytest.approx(0.5)

    def test_polynomial_defaults(self):
        shape = make_shape(Family.POLYNOMIAL, {'p': 2.0})
        scales = make_scale_set(shape, CoefficientConfig(q=1.0, m=2))
        assert scales.theta_exponent == pytest.approx(2.0)
        assert scales.xi_exponent == pytest.approx(0.5)
        assert float(scales.theta(1.0)) == pytest.approx(4.0)

    def test_q_not_below_p_is_rejected(self):
        shape = make_shape(Family.POLYNOMIAL, {'p': 2.0})
        with pytest.raises(AdmissibilityError, match="0 <= q < p"):
            make_scale_set(shape, CoefficientConfig(q=2.0))

    def test_r_below_window_is_rejected(self):
        shape = make_shape(Family.POLYNOMIAL, {'p': 2.0})
        with pytest.raises(AdmissibilityError, match="r_m <= r <= 1"):
            make_scale_set(shape, CoefficientConfig(q=1.0, r=0.2, m=2))

    def test_suprapolynomial_beta_window(self):
        shape = make_shape(Family.SUPRAPOLYNOMIAL, {'alpha': 0.5})
        with pytest.raises(AdmissibilityError, match="beta > alpha - 1"):
            make_scale_set(shape, CoefficientConfig(family=Family.SUPRAPOLYNOMIAL, beta=-0.6))

    def test_exponential_rate_window(self):
        shape = make_shape(Family.EXPONENTIAL)
        with pytest.raises(AdmissibilityError, match="a < 1"):
            make_scale_set(shape, CoefficientConfig(family=Family.EXPONENTIAL, a=1.0))
        scales = make_scale_set(shape, CoefficientConfig(family=Family.EXPONENTIAL, a=0.5, m=2))
        assert scales.xi_rate == pytest.approx(-0.25)

    def test_m_must_be_positive(self):
        shape = make_shape(Family.POLYNOMIAL, {'p': 2.0})
        with pytest.raises(AdmissibilityError, match="m >= 1"):
            make_scale_set(shape, CoefficientConfig(m=0))


class TestBump:
    """Tests for the plateau bump ψ."""

    def test_absolute_mass_is_one_half(self, bump):
        mass = integrate.quad(lambda s: abs(bump.value(s)), 0.0, 1.0,
                              points=[bump.plateau_lo, bump.plateau_hi], epsabs=0.0, epsrel=1e-12,
                              limit=200)[0]
        assert mass == pytest.approx(0.5, rel=1e-9)
        assert 0.0 < bump.scale < 1.0

    def test_vanishes_outside_unit_interval(self, bump):
        s = np.array([-0.5, 0.0, 1.0, 1.5])
        np.testing.assert_array_equal(bump.eval(s), 0.0)

    def test_plateau_value(self, bump):
        assert bump.value(0.5) == pytest.approx(bump.scale)

    def test_rejects_low_smoothness(self):
        with pytest.raises(ShapeParameterError, match="smoothness_order"):
            make_bump(smoothness_order=1)

    def test_rejects_empty_plateau(self):
        with pytest.raises(ShapeParameterError, match="plateau"):
            make_bump(plateau_lo=0.6, plateau_hi=0.4)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(min_value=0.0, max_value=1.0))
    def test_scalar_and_array_paths_agree(self, s):
        bump = make_bump()
        value = bump.value(s)
        assert 0.0 <= value <= bump.scale
        assert float(bump.eval(np.array([s]))[0]) == pytest.approx(value, abs=1e-15)

    def test_jet_derivative_matches_finite_difference(self, bump):
        s = np.array([0.05, 0.5, 0.93])
        h = 1e-6
        fd = (bump.eval(s + h) - bump.eval(s - h)) / (2.0 * h)
        np.testing.assert_allclose(bump.deriv(s, 1), fd, rtol=1e-5, atol=1e-7)


class TestSequences:
    """Tests for the packet sequences."""

    def test_polynomial_counterexample_periods(self):
        shape = make_shape(Family.POLYNOMIAL, {'p': 2.0})
        scales = make_scale_set(shape, CoefficientConfig(q=1.0, m=2))
        t, delta, nu = counterexample_sequences(shape, scales, epsilon=0.5, sigma=2.0, j_max=5)
        assert t == pytest.approx([2.0, 4.0, 8.0, 16.0, 32.0])
        assert delta == pytest.approx([0.5] * 5)
        assert nu == [2, 2, 3, 4, 6]

    def test_polynomial_admissible_sequences(self):
        shape = make_shape(Family.POLYNOMIAL, {'p': 2.0})
        scales = make_scale_set(shape, CoefficientConfig(q=1.0, r=0.5, m=2))
        t, delta, eta = admissible_sequences(shape, scales, j_max=3)
        assert t == pytest.approx([2.0, 4.0, 8.0])
        assert delta == pytest.approx([2.0 ** -0.5, 1.0, 2.0 ** 0.5])
        assert eta == pytest.approx([2.0 ** -0.5, 0.5, 2.0 ** -1.5])

    def test_constant_family_has_no_sequences(self):
        shape = make_shape(Family.CONSTANT)
        scales = make_scale_set(shape, CoefficientConfig(family=Family.CONSTANT))
        with pytest.raises(AdmissibilityError):
            admissible_sequences(shape, scales, 3)


class TestCoefficientService:
    """Tests for CoefficientService.build."""

    def test_unperturbed_coefficient(self, polynomial_coef):
        assert not polynomial_coef.has_perturbation
        assert polynomial_coef.value(1.0) == pytest.approx(4.0)

    def test_admissible_omega_is_one_outside_packets(self, admissible_coef):
        pert = admissible_coef.perturbation
        assert pert.value(1.0) == 1.0
        start, end = pert.packet_for(1)
        assert pert.value(end + 1e-9) == 1.0
        middle = start + 0.5 * (end - start)
        assert pert.value(middle) == pytest.approx(1.0 + pert.eta_seq[0] * pert.bump.scale)

    def test_admissible_bounds(self, admissible_coef):
        c1, c2 = admissible_coef.perturbation.bounds()
        assert c1 == 1.0
        assert 1.0 < c2 < 2.0

    def test_coefficient_jet_matches_finite_difference(self, admissible_coef):
        t = np.array([2.05, 4.5, 50.0])
        h = 1e-6
        fd = (admissible_coef.eval(t + h) - admissible_coef.eval(t - h)) / (2.0 * h)
        np.testing.assert_allclose(admissible_coef.deriv(t, 1), fd, rtol=1e-5)

    def test_counterexample_periods(self, counterexample_coef):
        pert = counterexample_coef.perturbation
        assert pert.nu_seq[:4] == (2, 2, 3, 4)
        assert counterexample_coef.m_max == 4

    def test_explicit_sequences_override_generated_ones(self, admissible_config):
        coefficient = replace(admissible_config.coefficient, t_seq=[3.0, 10.0], delta_seq=[1.0, 2.0],
                              eta_seq=[0.5, 0.25])
        coef = CoefficientService(replace(admissible_config, coefficient=coefficient)).build()
        assert coef.perturbation.t_seq == (3.0, 10.0)

    def test_overlapping_packets_are_rejected(self, admissible_config):
        coefficient = replace(admissible_config.coefficient, t_seq=[3.0, 4.0], delta_seq=[2.0, 1.0],
                              eta_seq=[0.5, 0.5])
        with pytest.raises(AdmissibilityError, match="delta_j"):
            CoefficientService(replace(admissible_config, coefficient=coefficient)).build()

    def test_amplitude_above_one_is_rejected(self, admissible_config):
        coefficient = replace(admissible_config.coefficient, t_seq=[3.0], delta_seq=[1.0], eta_seq=[1.5])
        with pytest.raises(AdmissibilityError, match="eta_j <= 1"):
            CoefficientService(replace(admissible_config, coefficient=coefficient)).build()

    def test_constant_family_ignores_perturbation(self, constant_config):
        coefficient = replace(constant_config.coefficient, perturbation=PerturbationKind.ADMISSIBLE)
        coef = CoefficientService(replace(constant_config, coefficient=coefficient)).build()
        assert not coef.has_perturbation

    def test_hypothesis_ratios_per_packet(self, counterexample_coef):
        rows = hypothesis_ratios(counterexample_coef)
        assert [row['j'] for row in rows] == [1, 2, 3, 4, 5, 6]
        first = rows[0]
        # δ₁λ(2)/Λ(2) with δ₁ = 1/2, λ(2) = 9, Λ(2) = 1 + 26/3
        assert first['delta_lambda_over_Lambda'] == pytest.approx(0.5 * 9.0 / (1.0 + 26.0 / 3.0))
        assert first['lambda_ratio'] == pytest.approx((3.5 / 3.0) ** 2)
