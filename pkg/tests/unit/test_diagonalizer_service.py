"""
Unit tests for the diagonalization hierarchy.
"""

from dataclasses import replace

import numpy as np
import pytest

from gecl.config import Family
from gecl.domain.reports import Verdict
from gecl.domain.diagonalizer import SymbolClassTag
from gecl.services.coefficient_service import CoefficientService
from gecl.services.diagonalizer_service import (
    DerivativeBudgetError,
    DiagonalizerService,
    ZoneConstantTooSmallError,
    transform_m,
)
from tests.conftest import small_config


@pytest.fixture
def diag(config):
    return DiagonalizerService(config)


class TestZeroStep:
    """Tests for the first level after conjugation with M(t)."""

    def test_eigenvalues_of_first_level(self, diag, polynomial_coef):
        t = np.array([5.0, 10.0, 40.0])
        xi = 2.0
        state = diag.step0(polynomial_coef, t, xi)
        a = (1.0 + t) ** 2
        np.testing.assert_allclose(state.tau_plus.value.real, a * xi)
        np.testing.assert_allclose(state.tau_minus.value.real, -a * xi)
        # Im τ₁± = −a'/(2a) = −1/(1 + t) for p = 2
        np.testing.assert_allclose(state.tau_plus.value.imag, -1.0 / (1.0 + t))
        np.testing.assert_allclose(state.tau_minus.value.imag, -1.0 / (1.0 + t))

    def test_jets_lose_one_order(self, diag, polynomial_coef):
        state = diag.step0(polynomial_coef, np.array([3.0]), 1.0)
        assert state.budget == polynomial_coef.m_max - 1

    def test_needs_a_derivative(self, diag, polynomial_coef):
        with pytest.raises(DerivativeBudgetError):
            diag.step0(polynomial_coef, np.array([1.0]), 1.0, order=0)

    def test_transform_m_determinant(self):
        M = transform_m(np.array([1.5]))[0]
        assert np.linalg.det(M) == pytest.approx(2.0 / 1.5)


class TestHierarchy:
    """Tests for further diagonalization steps."""

    def test_second_level_imaginary_parts_agree(self, diag, polynomial_coef):
        t = np.array([20.0, 60.0, 100.0])
        states = diag.hierarchy(polynomial_coef, t, 1.0, k_max=2)
        second = states[1]
        assert second.level == 2
        assert np.all(second.d < 1.0)
        np.testing.assert_allclose(second.tau_plus.value.imag, second.tau_minus.value.imag,
                                   rtol=1e-8, atol=1e-14)

    def test_small_zone_constant_raises(self, diag, polynomial_coef):
        # at t = 0 and |ξ| = 10⁻³ the ratio |β₁|²/δ₁² is far above 1
        state = diag.step0(polynomial_coef, np.array([0.0]), 1e-3)
        with pytest.raises(ZoneConstantTooSmallError, match="raise N"):
            diag.step_k(state)

    def test_budget_exhausted(self, diag, polynomial_coef):
        state = diag.step0(polynomial_coef, np.array([50.0]), 1.0, order=1)
        with pytest.raises(DerivativeBudgetError):
            diag.step_k(state)

    def test_rejects_k_max_zero(self, diag, polynomial_coef):
        with pytest.raises(ValueError):
            diag.hierarchy(polynomial_coef, np.array([1.0]), 1.0, k_max=0)

    def test_exponential_closed_form(self):
        # a = e^t: β₁ = 1/2, δ₁ = 2e^t|ξ|, so d₁ = 1/(16e^{2t}|ξ|²)
        config = small_config(family=Family.EXPONENTIAL, a=0.5, m=2)
        coef = CoefficientService(config).build()
        t = np.array([0.5, 1.0, 2.0])
        first, second = DiagonalizerService(config).hierarchy(coef, t, 1.0, k_max=2)
        d1 = 1.0 / (16.0 * np.exp(2.0 * t))
        np.testing.assert_allclose(first.d, d1, rtol=1e-12)
        expected = -0.5 + d1 / (1.0 - d1)
        np.testing.assert_allclose(second.tau_plus.value.imag, expected, rtol=1e-10)
        np.testing.assert_allclose(second.tau_minus.value.imag, expected, rtol=1e-10)

    def test_level_rows(self, diag, polynomial_coef):
        states = diag.hierarchy(polynomial_coef, np.array([20.0, 30.0]), 1.0, k_max=2)
        rows = diag.level_rows(states)
        assert len(rows) == 4
        assert {row['k'] for row in rows} == {1.0, 2.0}

    def test_operator_identity_with_jets(self, diag, polynomial_coef):
        residual = diag.operator_identity_residual(polynomial_coef, np.array([20.0, 60.0]), 1.0, level=1)
        assert residual < 1e-9

    def test_operator_identity_with_finite_differences(self, config, polynomial_coef):
        config = replace(config, diagonalizer=replace(config.diagonalizer, use_finite_differences=True))
        residual = DiagonalizerService(config).operator_identity_residual(
            polynomial_coef, np.array([20.0, 60.0]), 1.0, level=1)
        assert residual < 1e-6

    def test_imaginary_parts_report(self, diag, polynomial_coef):
        report = diag.check_imaginary_parts(polynomial_coef)
        assert report.status == Verdict.PASS
        assert 1.0 / 20.0 <= report.metrics["min_ratio"] <= report.metrics["max_ratio"] <= 20.0

    def test_operator_identity_report(self, diag, polynomial_coef):
        report = diag.check_operator_identity(polynomial_coef)
        assert report.status == Verdict.PASS
        assert report.metrics["max_residual"] <= 1e-6

    def test_sample_points_lie_in_hyperbolic_zone(self, diag, polynomial_coef):
        from gecl.services.zone_service import ZoneService
        zones = ZoneService(polynomial_coef)
        for xi, ladder in diag.sample_points(polynomial_coef):
            assert ladder[0] >= zones.boundaries(xi).t2_or_zero - 1e-12


class TestSymbolClass:
    """Tests for the symbol class weights."""

    def test_remainder_class(self):
        tag = SymbolClassTag.remainder_class(k=1, m=3)
        assert (tag.m1, tag.m2, tag.m3, tag.ell) == (0, 0, 1, 2)
        assert tag.describe() == "S^2{0,0,1}"

    def test_weight(self):
        tag = SymbolClassTag(m1=1.0, m2=1.0, m3=1.0)
        assert float(tag.weight(2.0, 4.0, 3.0, k=1)) == pytest.approx(9.0 / 8.0)


class TestLinksToPropagator:
    """Tests that tie the hierarchy to integrated propagators."""

    def test_symbol_decay_metrics(self, diag, polynomial_coef):
        report = diag.check_symbol_decay(polynomial_coef)
        # δ₁ = 2a|ξ| exactly
        assert report.metrics['separation_k1'] == pytest.approx(1.0)
        assert 0.5 < report.metrics['separation_k2'] < 1.5
        assert report.metrics['separation_constant_max'] >= report.metrics['separation_constant_k2']
        assert report.metrics['m'] == 2
        assert {row['class'] for row in report.rows} == {'S^1{0,0,1}', 'S^0{-1,-1,2}'}

    def test_norm_lies_in_factorisation_band(self, diag, polynomial_coef):
        report = diag.propagator_consistency(polynomial_coef, 0.1, t_samples=[10.0, 20.0, 30.0])
        assert report.status == Verdict.PASS
        assert report.metrics['violations'] == 0
        assert len(report.rows) == 3

    def test_q_ladder_rows(self, diag, polynomial_coef):
        ladder = np.geomspace(11.0, 41.0, 10) - 1.0
        report = diag.q_convergence(polynomial_coef.shape, polynomial_coef.scales, 0.1, t_ladder=ladder)
        assert len(report.rows) == 9
        assert np.isfinite(report.metrics['norm_q_limit'])
        assert all(np.isfinite(row['scaled_gap']) for row in report.rows)
        assert report.status != Verdict.FAIL
