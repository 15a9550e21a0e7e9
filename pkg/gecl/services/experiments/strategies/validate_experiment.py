# gecl/services/experiments/strategies/validate_experiment.py
"""
Step 0: Assumption certification.

Runs (A1), (A1+), (A2), (A3) and the configured (A4)/(A5) variants on one
shared grid. A failed assumption is a finding: the experiment still
executes, and dependents only skip when a structural check fails.
"""

from gecl.domain.experiment import ExperimentResult
from gecl.domain.reports import CheckReport, Verdict
from gecl.logging_config import get_logger
from gecl.services.assumption_validator import AssumptionValidator
from gecl.services.coefficient_service import hypothesis_ratios
from gecl.services.interfaces import ExperimentContext, IExperiment

logger = get_logger("strategy.validate")


class ValidateExperiment(IExperiment):
    """Certify the assumptions for the configured coefficient."""

    @property
    def name(self) -> str:
        return "validate"

    @property
    def step_order(self) -> float:
        return 0.0

    def run(self, context: ExperimentContext) -> ExperimentResult:
        coef = context.coefficient
        report = AssumptionValidator(context.config).validate(coef)
        context.validation = report

        reports = list(report.checks.values())
        if coef.has_perturbation:
            # packet sizes next to the stabilisation hypotheses; reported only
            reports.append(CheckReport(
                name='packets',
                status=Verdict.PASS,
                metrics={'count': len(coef.perturbation.packets)},
                rows=hypothesis_ratios(coef),
            ))

        failed = [r.name for r in reports if r.status == Verdict.FAIL]
        if failed:
            logger.info(f"📊 failing assumptions: {', '.join(failed)}")
        return ExperimentResult.from_reports(self.name, reports, metrics={'grid': report.grid})
