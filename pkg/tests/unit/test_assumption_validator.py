"""
Unit tests for AssumptionValidator.

The polynomial coefficient (1+t)² with Θ = (1+t)² satisfies the shape and
stabilisation assumptions, so its verdicts are known in closed form.
"""

import numpy as np
import pytest

from gecl.config import AppConfig, CoefficientConfig, Family, PerturbationKind
from gecl.domain.reports import Verdict
from gecl.services.assumption_validator import AssumptionValidator, SymbolVariant
from gecl.services.coefficient_service import CoefficientService


@pytest.fixture
def validator(config):
    return AssumptionValidator(config)


class TestGrid:
    """Tests for the shared sample grid."""

    def test_grid_spans_horizon(self, validator, polynomial_coef):
        grid = validator.build_grid(polynomial_coef)
        assert grid[0] == 0.0
        assert grid[-1] == pytest.approx(100.0)
        assert np.all(np.diff(grid) > 0)

    def test_packets_refine_grid(self, validator, counterexample_coef):
        coarse = validator.build_grid(counterexample_coef, with_packets=False)
        fine = validator.build_grid(counterexample_coef)
        assert fine.size > coarse.size
        start, end = counterexample_coef.perturbation.packet_for(2)
        assert np.sum((fine >= start) & (fine <= end)) >= 16


class TestShapeAssumptions:
    """Tests for (A1), (A1+) and (A2)."""

    def test_polynomial_passes(self, validator, polynomial_coef):
        report = validator.check_a1_a1plus_a2(polynomial_coef)
        assert report.status('A1') == Verdict.PASS
        assert report.status('A1plus') == Verdict.PASS
        assert report.status('A2') == Verdict.PASS

    def test_ratio_constants(self, validator, polynomial_coef):
        # λ'Λ/λ² = 2(2 + (1+t)³)/(3(1+t)³): 2 at t = 0, towards 2/3
        a1 = validator.check_a1_a1plus_a2(polynomial_coef).checks['A1']
        assert a1.metrics['ratio_sup'] == pytest.approx(2.0)
        assert a1.metrics['ratio_sup_t'] == 0.0
        assert 2.0 / 3.0 < a1.metrics['ratio_inf'] < 0.7

    def test_counterexample_keeps_omega_bounds(self, validator, counterexample_coef):
        a2 = validator.check_a1_a1plus_a2(counterexample_coef).checks['A2']
        assert a2.status == Verdict.PASS
        assert a2.metrics['c1'] == pytest.approx(1.0)
        assert a2.metrics['c2'] > 1.0


class TestStabilisation:
    """Tests for (A3)."""

    def test_unperturbed_polynomial_passes(self, validator, polynomial_coef):
        a3 = validator.check_a3(polynomial_coef).checks['A3']
        assert a3.status == Verdict.PASS
        assert a3.metrics['constant'] == 0.0
        assert a3.metrics['tail_drop'] <= 0.5


class TestValidate:
    """Tests for the combined run."""

    def test_every_check_is_reported(self, validator, polynomial_coef):
        report = validator.validate(polynomial_coef)
        assert set(report.checks) == {
            'A1', 'A1plus', 'A2', 'A3', 'A4', 'A5', 'A4prime', 'A5prime', 'A4doubleprime',
        }
        assert report.grid['horizon'] == pytest.approx(100.0)
        assert report.rows()

    def test_single_variant(self, validator, polynomial_coef):
        report = validator.check_a4_a5(polynomial_coef, variant=SymbolVariant.A4_DOUBLE_PRIME)
        assert set(report.checks) == {'A4doubleprime', 'A5prime'}
        assert report.checks['A4doubleprime'].metrics['orders'] == polynomial_coef.m_max


def default_grid_config(**coefficient) -> AppConfig:
    """Shipped grid and validator settings (t up to 1000)."""
    return AppConfig(coefficient=CoefficientConfig(**coefficient))


class TestDefaultGridDichotomy:
    """Verdicts on the full default grid for both sides of the dichotomy."""

    POLYNOMIAL = dict(family=Family.POLYNOMIAL, p=2.0, q=1.0, r=0.5, m=2)

    def test_admissible_polynomial_passes_everything(self):
        config = default_grid_config(perturbation=PerturbationKind.ADMISSIBLE, **self.POLYNOMIAL)
        coef = CoefficientService(config).build()
        report = AssumptionValidator(config).validate(coef, variants=['A4'])
        for name in ('A1', 'A1plus', 'A2', 'A3', 'A4', 'A5'):
            assert report.status(name) == Verdict.PASS, name
        # λ'Λ/λ² falls from 2 towards 2/3 without a witness
        assert report.checks['A1'].metrics['ratio_inf'] > 0.6
        assert 'growth_witness' not in report.checks['A4'].metrics

    def test_counterexample_fails_only_the_symbol_estimate(self):
        config = default_grid_config(perturbation=PerturbationKind.COUNTEREXAMPLE,
                                     epsilon=0.5, sigma=2.0, **self.POLYNOMIAL)
        coef = CoefficientService(config).build()
        report = AssumptionValidator(config).validate(coef, variants=['A4doubleprime'])
        for name in ('A1', 'A1plus', 'A2', 'A3'):
            assert report.status(name) == Verdict.PASS, name
        a4 = report.checks['A4doubleprime']
        assert a4.status == Verdict.FAIL
        assert a4.metrics['growth_witness']['kind'] == 'packet'

    def test_suprapolynomial_shape_passes(self):
        config = default_grid_config(family=Family.SUPRAPOLYNOMIAL, alpha=0.5, beta=0.5, m=2)
        coef = CoefficientService(config).build()
        report = AssumptionValidator(config).check_a1_a1plus_a2(coef)
        assert report.status('A1') == Verdict.PASS
        assert report.status('A1plus') == Verdict.PASS
