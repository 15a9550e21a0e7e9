"""
Desk-scale acceptance runs.

These integrate over long horizons and are deselected by default;
run them with ``pytest -m slow``.
"""

from dataclasses import replace

import numpy as np
import pytest

from gecl.config import AppConfig, CoefficientConfig, EnergyConfig, Family, PerturbationKind
from gecl.domain.floquet import InstabilityInterval
from gecl.domain.reports import Verdict
from gecl.services.assumption_validator import AssumptionValidator, SymbolVariant
from gecl.services.coefficient_service import CoefficientService
from gecl.services.energy_service import EnergyService, make_cauchy_data
from gecl.services.floquet_service import FloquetService
from gecl.services.propagator_service import PropagatorService

pytestmark = pytest.mark.slow

WORKED_EXAMPLES = {
    'polynomial': CoefficientConfig(family=Family.POLYNOMIAL, p=2.0, q=1.0, r=0.5, m=2),
    'suprapolynomial': CoefficientConfig(family=Family.SUPRAPOLYNOMIAL, alpha=0.5, beta=0.5, m=2),
    'exponential': CoefficientConfig(family=Family.EXPONENTIAL, a=0.5, b=-0.25, m=2),
}

# largest horizons with Λ(T)·ρ within a few 10⁴ radians for annulus data on [1, 2]
ENERGY_HORIZONS = {'polynomial': 40.0, 'suprapolynomial': 50.0, 'exponential': 10.0}
LIOUVILLE_HORIZONS = {'polynomial': 30.0, 'suprapolynomial': 50.0, 'exponential': 10.0}

COUNTEREXAMPLES = {
    'polynomial': replace(WORKED_EXAMPLES['polynomial'], perturbation=PerturbationKind.COUNTEREXAMPLE,
                          epsilon=0.5, sigma=2.0),
    'suprapolynomial': replace(WORKED_EXAMPLES['suprapolynomial'],
                               perturbation=PerturbationKind.COUNTEREXAMPLE, epsilon=0.5),
    'exponential': replace(WORKED_EXAMPLES['exponential'], perturbation=PerturbationKind.COUNTEREXAMPLE,
                           epsilon=0.5, sigma=2.0, j_max=8),
}

SHAPE_AND_SYMBOL = ('A1', 'A1plus', 'A2', 'A3', 'A4', 'A5')


def build(coefficient: CoefficientConfig, **sections):
    config = AppConfig(coefficient=coefficient, **sections)
    return config, CoefficientService(config).build()


@pytest.mark.parametrize("family", sorted(WORKED_EXAMPLES))
def test_liouville_invariant(family):
    config, coef = build(WORKED_EXAMPLES[family])
    report = PropagatorService(config).liouville_survey(coef, xis=[0.05, 0.5, 2.0],
                                                        t_max=LIOUVILLE_HORIZONS[family])
    assert report.status == Verdict.PASS
    assert report.metrics['max_det_err'] < 1e-8


def test_free_wave_conservation_to_t_100():
    config = AppConfig(coefficient=CoefficientConfig(family=Family.CONSTANT),
                       energy=EnergyConfig(t_max=100.0))
    config = replace(config, propagator=replace(config.propagator, tol=1e-11))
    coef = CoefficientService(config).build()
    service = EnergyService(config)
    report = service.check_conservation(coef, make_cauchy_data(config.energy))
    assert report.status == Verdict.PASS


def test_oracle_equivalence_on_fifty_intervals():
    config, coef = build(WORKED_EXAMPLES['polynomial'])
    report = PropagatorService(config).check_oracle(coef, count=50, rng=np.random.default_rng([config.seed, 1]))
    assert report.status == Verdict.PASS
    assert len(report.rows) == 50


class TestLambdaTwoSided:
    """λ = (1+t)², ω ≡ 1, N = 10, 16 frequencies up to t = 10³."""

    def test_ratio_stays_in_band(self):
        config, coef = build(WORKED_EXAMPLES['polynomial'])
        report = PropagatorService(config).verify_lambda_two_sided(coef.shape, coef.scales, N=10.0, t_max=1000.0)
        assert report.metrics['frequencies'] == 16
        assert report.status == Verdict.PASS
        assert report.min_ratio >= 1.0 / 20.0
        assert report.max_ratio <= 20.0
        assert report.drift < 0.05

    def test_entry_bounds_in_the_pseudo_differential_zone(self):
        config, coef = build(WORKED_EXAMPLES['polynomial'])
        report = PropagatorService(config).verify_pd_zone(coef)
        assert report.status != Verdict.FAIL
        assert all(np.isfinite(v) for v in report.backward.values())
        assert all(np.isfinite(v) for v in report.forward.values())


class TestEnergyLaw:
    """E_λ(t;u)/λ(t) for annulus data on the worked examples."""

    @pytest.mark.parametrize("family", sorted(WORKED_EXAMPLES))
    def test_two_sided_energy_bounds(self, family):
        config, coef = build(WORKED_EXAMPLES[family],
                             energy=EnergyConfig(t_max=ENERGY_HORIZONS[family], quad_points=24))
        service = EnergyService(config)
        data = make_cauchy_data(config.energy)
        upper = service.verify_upper_bound(coef, data)
        lower = service.verify_lower_bound(coef, data)
        assert upper.status == Verdict.PASS
        assert np.isfinite(upper.metrics['constant'])
        assert lower.status != Verdict.FAIL
        assert lower.metrics['constant'] > 0.0
        assert np.isfinite(lower.metrics['spread'])

    def test_polynomial_ratio_has_settled(self):
        config, coef = build(WORKED_EXAMPLES['polynomial'],
                             energy=EnergyConfig(t_max=ENERGY_HORIZONS['polynomial'], quad_points=24))
        report = EnergyService(config).verify_lower_bound(coef, make_cauchy_data(config.energy))
        assert report.status == Verdict.PASS
        assert report.metrics['drift'] < 0.05


class TestAssumptionDichotomy:
    """Validator verdicts on the worked examples and on the counterexamples."""

    @pytest.mark.parametrize("family", sorted(WORKED_EXAMPLES))
    def test_worked_example_passes(self, family):
        config, coef = build(WORKED_EXAMPLES[family])
        report = AssumptionValidator(config).validate(coef, variants=['A4'])
        for name in SHAPE_AND_SYMBOL:
            assert report.status(name) == Verdict.PASS, name

    @pytest.mark.parametrize("family", ['suprapolynomial', 'exponential'])
    def test_admissible_perturbation_passes(self, family):
        config, coef = build(replace(WORKED_EXAMPLES[family], perturbation=PerturbationKind.ADMISSIBLE))
        report = AssumptionValidator(config).validate(coef, variants=['A4'])
        for name in SHAPE_AND_SYMBOL:
            assert report.status(name) == Verdict.PASS, name

    @pytest.mark.parametrize("family", sorted(COUNTEREXAMPLES))
    def test_counterexample_fails_with_packet_witness(self, family):
        config, coef = build(COUNTEREXAMPLES[family])
        report = AssumptionValidator(config).check_a4_a5(coef, variant=SymbolVariant.A4_DOUBLE_PRIME)
        check = report.checks['A4doubleprime']
        assert check.status == Verdict.FAIL
        witness = check.metrics['growth_witness']
        assert witness['kind'] == 'packet'
        sups = witness['packet_sups'][-4:]
        assert all(b > a for a, b in zip(sups, sups[1:]))


def test_default_bump_is_unstable():
    config, coef = build(COUNTEREXAMPLES['polynomial'])
    floquet = FloquetService(config)
    interval = floquet.find_instability_interval(coef.perturbation.bump)
    assert interval.mu_min > 1.01
    report = floquet.sweep_report(floquet.sweep(coef.perturbation.bump, points=400))
    assert report.metrics['unstable_points'] > 0


def test_counterexample_packets_amplify():
    config, coef = build(replace(COUNTEREXAMPLES['polynomial'], j_max=8))
    floquet = FloquetService(config)
    interval = floquet.find_instability_interval(coef.perturbation.bump)
    runs = floquet.amplification_experiment(coef, interval, j_list=list(range(1, 9)), count=3)
    report = floquet.amplification_report(runs)
    assert report.status == Verdict.PASS
    assert report.metrics['j_threshold'] <= 8


class TestBlowupCondition:
    """The blow-up sequence above and below the σ threshold."""

    INTERVAL = InstabilityInterval(lo=1.0, hi=1.2, mu_min=2.0)

    @pytest.mark.parametrize("coefficient", [
        replace(COUNTEREXAMPLES['polynomial'], sigma=1.0e4, j_max=3),
        CoefficientConfig(family=Family.EXPONENTIAL, a=0.5, m=2, perturbation=PerturbationKind.COUNTEREXAMPLE,
                          epsilon=1.0, sigma=20.0, j_max=3),
    ], ids=['polynomial', 'exponential'])
    def test_enlarged_sigma_decreases_to_zero(self, coefficient):
        config, coef = build(coefficient)
        report = FloquetService(config).blowup_condition(coef, self.INTERVAL)
        assert report.extra['criterion_holds']
        assert report.contradiction
        assert all(np.diff(report.log_terms[-4:]) < 0)

    @pytest.mark.parametrize("coefficient", [
        replace(COUNTEREXAMPLES['polynomial'], j_max=3),
        CoefficientConfig(family=Family.EXPONENTIAL, a=0.5, m=2, perturbation=PerturbationKind.COUNTEREXAMPLE,
                          epsilon=1.0, sigma=1.0, j_max=3),
    ], ids=['polynomial', 'exponential'])
    def test_small_sigma_does_not_decrease(self, coefficient):
        config, coef = build(coefficient)
        report = FloquetService(config).blowup_condition(coef, self.INTERVAL)
        assert not report.extra['criterion_holds']
        assert not report.decreasing
        assert not report.contradiction


class TestScattering:
    """Scattering deficiency and two-sidedness on gap data with non-trivial coefficients."""

    @pytest.mark.parametrize("family, t_grid", [
        ('polynomial', [4.0, 8.0, 12.0]),
        ('exponential', [3.0, 5.0, 7.0]),
    ])
    def test_deficiency_and_norm_ratio(self, family, t_grid):
        config, coef = build(WORKED_EXAMPLES[family], energy=EnergyConfig(t_max=max(t_grid)))
        config = replace(config, propagator=replace(config.propagator, tol=1e-11))
        report = EnergyService(config).scattering_check(coef, make_cauchy_data(config.energy), t_grid=t_grid)
        assert report.status == Verdict.PASS
        assert report.metrics['max_deficiency'] <= 1e-7
        assert 0.5 <= report.metrics['norm_ratio_min'] <= report.metrics['norm_ratio_max'] <= 2.0
        assert report.rows
