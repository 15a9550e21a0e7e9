"""
Unit tests for the experiment pipeline and the strategy prerequisites.
"""

from typing import List, Optional

import numpy as np
import pytest

from gecl.domain.experiment import ExperimentResult, ExperimentStatus
from gecl.domain.reports import CheckReport, ValidationReport, Verdict
from gecl.services.experiments import (
    CounterexampleExperiment,
    ExperimentPipeline,
    ZonesExperiment,
)
from gecl.services.interfaces import ExperimentContext, IExperiment


class RecordingExperiment(IExperiment):
    """Test strategy that records its calls and returns a fixed verdict."""

    def __init__(self, name: str, order: float, verdict: Verdict = Verdict.PASS,
                 requires=(), gate=(), fail: bool = False, calls: Optional[List[str]] = None):
        self._name = name
        self._order = order
        self.verdict = verdict
        self.requires = tuple(requires)
        self.validation_gate = tuple(gate)
        self.fail = fail
        self.calls = calls if calls is not None else []

    @property
    def name(self) -> str:
        return self._name

    @property
    def step_order(self) -> float:
        return self._order

    def run(self, context: ExperimentContext) -> ExperimentResult:
        self.calls.append(self._name)
        if self.fail:
            raise RuntimeError(f"{self._name} exploded")
        return ExperimentResult.from_reports(self._name, [CheckReport(name='check', status=self.verdict)])


@pytest.fixture
def context(config, polynomial_coef):
    return ExperimentContext(config=config, coefficient=polynomial_coef)


class TestPipeline:
    """Tests for ordering, skipping and error capture."""

    def test_runs_in_step_order(self, context):
        calls: List[str] = []
        pipeline = ExperimentPipeline([
            RecordingExperiment('energy', 6.0, calls=calls),
            RecordingExperiment('validate', 0.0, calls=calls),
            RecordingExperiment('zones', 1.0, calls=calls),
        ])
        results = pipeline.run(context, ['zones', 'energy', 'validate'])
        assert calls == ['validate', 'zones', 'energy']
        assert list(results) == calls
        assert context.results['zones'].status == ExperimentStatus.PASS

    def test_only_requested_experiments_run(self, context):
        calls: List[str] = []
        pipeline = ExperimentPipeline([RecordingExperiment('validate', 0.0, calls=calls),
                                       RecordingExperiment('zones', 1.0, calls=calls)])
        pipeline.run(context, ['zones'])
        assert calls == ['zones']

    def test_duplicate_registration_raises(self):
        pipeline = ExperimentPipeline([RecordingExperiment('zones', 1.0)])
        with pytest.raises(ValueError, match="registered twice"):
            pipeline.add_strategy(RecordingExperiment('zones', 2.0))

    def test_unknown_experiment_raises(self, context):
        with pytest.raises(ValueError, match="no strategy"):
            ExperimentPipeline([RecordingExperiment('zones', 1.0)]).run(context, ['plot'])

    def test_exception_becomes_error_and_run_continues(self, context):
        calls: List[str] = []
        pipeline = ExperimentPipeline([
            RecordingExperiment('floquet', 4.0, fail=True, calls=calls),
            RecordingExperiment('energy', 6.0, calls=calls),
        ])
        results = pipeline.run(context, ['floquet', 'energy'])
        assert results['floquet'].status == ExperimentStatus.ERROR
        assert results['floquet'].message == "RuntimeError: floquet exploded"
        assert results['energy'].status == ExperimentStatus.PASS

    def test_failed_verdict_is_not_an_error(self, context):
        pipeline = ExperimentPipeline([RecordingExperiment('zones', 1.0, verdict=Verdict.FAIL)])
        result = pipeline.run(context, ['zones'])['zones']
        assert result.status == ExperimentStatus.FAIL
        assert result.executed

    def test_dependent_of_failed_prerequisite_is_skipped(self, context):
        pipeline = ExperimentPipeline([
            RecordingExperiment('floquet', 4.0, fail=True),
            RecordingExperiment('counterexample', 5.0, requires=('floquet',)),
        ])
        results = pipeline.run(context, ['floquet', 'counterexample'])
        assert results['counterexample'].status == ExperimentStatus.SKIPPED
        assert "floquet" in results['counterexample'].message

    def test_on_result_callback(self, context):
        seen = []
        ExperimentPipeline([RecordingExperiment('zones', 1.0)]).run(context, ['zones'], on_result=seen.append)
        assert [r.name for r in seen] == ['zones']

    def test_default_pipeline_covers_every_experiment(self):
        from gecl.config import EXPERIMENT_NAMES
        assert ExperimentPipeline.create_default().names == list(EXPERIMENT_NAMES)


class TestPrerequisites:
    """Tests for the built-in skip rules."""

    def test_validation_gate(self, context):
        validation = ValidationReport()
        validation.add(CheckReport(name='A1', status=Verdict.FAIL))
        validation.add(CheckReport(name='A4', status=Verdict.FAIL))
        context.validation = validation
        assert ZonesExperiment().skip_reason(context) == "coefficient fails A1"

    def test_failed_symbol_estimate_does_not_gate(self, context):
        validation = ValidationReport()
        validation.add(CheckReport(name='A4', status=Verdict.FAIL))
        context.validation = validation
        assert ZonesExperiment().skip_reason(context) is None

    def test_gate_after_validate_error(self, context):
        context.results['validate'] = ExperimentResult.error('validate', RuntimeError('x'))
        assert "validate" in ZonesExperiment().skip_reason(context)

    def test_counterexample_needs_counterexample_coefficient(self, context):
        assert "counterexample" in CounterexampleExperiment().skip_reason(context)

    def test_context_rng_streams_are_reproducible(self, context):
        a = context.rng(3).random(4)
        b = context.rng(3).random(4)
        c = context.rng(4).random(4)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)
