"""
Unit tests for the verdict rules and report containers.
"""

import math

import numpy as np
import pytest

from gecl.domain.reports import (
    CheckReport,
    ValidationReport,
    Verdict,
    combine,
    growth_witness,
    inf_verdict,
    jsonable,
    running_max_drift,
    sup_verdict,
)

TIMES = np.array([0.0, 1.0, 9.0, 99.0, 999.0, 9999.0])


class TestGrowthWitness:
    """Tests for the growing-tail rule."""

    def test_geometric_growth(self):
        assert growth_witness([1.0, 2.0, 4.0, 8.0])

    def test_convergence_from_below_is_no_witness(self):
        assert not growth_witness([1.0, 1.5, 1.75, 1.875])

    def test_needs_four_values(self):
        assert not growth_witness([1.0, 10.0, 100.0])

    def test_ignores_non_finite_values(self):
        assert growth_witness([math.nan, 1.0, 3.0, 9.0, 27.0])

    def test_climbing_off_zero_is_no_witness(self):
        assert not growth_witness([0.0, 0.1, 0.2, 0.3])

    def test_stalling_pace_is_no_witness(self):
        # doubles once, then flattens out
        assert not growth_witness([0.5, 1.49, 1.4999, 1.5])
        assert not growth_witness([1e-9, 1e-3, 0.3, 0.33])

    def test_steady_pace_is_a_witness(self):
        assert growth_witness([1.0, 3.0, 8.0, 20.0])


class TestSupVerdict:
    """Tests for sup and inf verdicts on sampled functions."""

    def test_bounded_decay_passes(self):
        verdict, info = sup_verdict(TIMES, 1.0 / (1.0 + TIMES))
        assert verdict == Verdict.PASS
        assert info['sup'] == 1.0
        assert info['worst_t'] == 0.0

    def test_linear_growth_fails(self):
        verdict, info = sup_verdict(TIMES, 1.0 + TIMES)
        assert verdict == Verdict.FAIL
        assert info['witness'] == 'decade'

    def test_non_finite_fails(self):
        verdict, info = sup_verdict(TIMES, [1.0, 1.0, math.inf, 1.0, 1.0, 1.0])
        assert verdict == Verdict.FAIL
        assert info['worst_t'] == 9.0

    def test_packet_witness(self):
        verdict, info = sup_verdict(TIMES, np.ones_like(TIMES), packet_sups=[1.0, 3.0, 9.0, 27.0])
        assert verdict == Verdict.FAIL
        assert info['witness'] == 'packet'

    def test_single_late_jump_passes(self):
        # one late jump is not a growing tail
        values = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 1.5])
        verdict, info = sup_verdict(TIMES, values)
        assert verdict == Verdict.PASS
        assert info['sup'] == 1.5
        assert info['tail_share'] == 1.0

    def test_tail_share_against_global_sup(self):
        verdict, info = sup_verdict(TIMES, 1.0 / (1.0 + TIMES))
        assert verdict == Verdict.PASS
        assert info['tail_share'] == pytest.approx(1e-3)

    def test_zero_head_then_saturation_passes(self):
        # vanishes early, then settles near a constant
        values = np.array([0.0, 0.0, 1e-9, 1e-3, 0.3, 0.33])
        verdict, info = sup_verdict(TIMES, values)
        assert verdict == Verdict.PASS
        assert info['sup'] == pytest.approx(0.33)

    def test_empty_is_marginal(self):
        verdict, _ = sup_verdict([], [])
        assert verdict == Verdict.MARGINAL

    def test_inf_verdict(self):
        verdict, info = inf_verdict(TIMES, 1.0 + 1.0 / (1.0 + TIMES))
        assert verdict == Verdict.PASS
        assert info['inf'] == pytest.approx(1.0001)

    def test_inf_verdict_fails_on_zero(self):
        verdict, info = inf_verdict(TIMES, [1.0, 1.0, 0.0, 1.0, 1.0, 1.0])
        assert verdict == Verdict.FAIL
        assert info['inf'] == 0.0

    def test_inf_verdict_fails_on_decay(self):
        verdict, info = inf_verdict(TIMES, 1.0 / (1.0 + TIMES))
        assert verdict == Verdict.FAIL
        assert info['witness'] == 'decade'

    def test_inf_verdict_passes_on_decay_to_a_positive_limit(self):
        values = (2.0 / 3.0) * (1.0 + 2.0 / (1.0 + TIMES) ** 3)
        verdict, info = inf_verdict(TIMES, values)
        assert verdict == Verdict.PASS
        assert info['inf'] == pytest.approx(2.0 / 3.0, rel=1e-6)
        assert info['tail_share'] == pytest.approx(1.0)


class TestHelpers:
    """Tests for combine, drift and JSON conversion."""

    @pytest.mark.parametrize("verdicts, expected", [
        ([Verdict.PASS, Verdict.PASS], Verdict.PASS),
        ([Verdict.PASS, Verdict.MARGINAL], Verdict.MARGINAL),
        ([Verdict.MARGINAL, Verdict.FAIL, Verdict.PASS], Verdict.FAIL),
        ([], Verdict.PASS),
    ])
    def test_combine(self, verdicts, expected):
        assert combine(verdicts) == expected

    def test_running_max_drift(self):
        values = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 1.2])
        assert running_max_drift(TIMES, values) == pytest.approx(0.2)

    def test_jsonable(self):
        out = jsonable({'a': np.float64(1.5), 'b': [np.int64(2), np.bool_(True)],
                        'c': 1 + 2j, 'd': math.inf, 'e': Verdict.PASS, 3: (1, 2)})
        assert out == {'a': 1.5, 'b': [2, True], 'c': {'re': 1.0, 'im': 2.0},
                       'd': 'inf', 'e': 'pass', '3': [1, 2]}


class TestValidationReport:
    """Tests for the per-assumption report."""

    def test_add_merge_and_rows(self):
        first = ValidationReport(grid={'size': 3})
        first.add(CheckReport(name='A1', status=Verdict.PASS, rows=[{'t': 0.0}]))
        second = ValidationReport()
        second.add(CheckReport(name='A3', status=Verdict.MARGINAL))
        merged = first.merge(second)
        assert merged.status('A1') == Verdict.PASS
        assert merged.status('A3') == Verdict.MARGINAL
        assert merged.status('A5') is None
        assert merged.all_pass(['A1'])
        assert not merged.all_pass(['A1', 'A3'])
        assert merged.rows() == [{'assumption': 'A1', 't': 0.0}]

    def test_to_dict(self):
        report = CheckReport(name='A2', status=Verdict.FAIL, metrics={'c1': np.float64(0.5)})
        assert report.to_dict() == {'name': 'A2', 'status': 'fail', 'metrics': {'c1': 0.5}, 'notes': []}
