# gecl/services/experiments/strategies/counterexample_experiment.py
"""
Step 5: Energy amplification on the packets of a counterexample coefficient
and the Cauchy-data blow-up sequence.
"""

from typing import Optional

from gecl.domain.experiment import ExperimentResult
from gecl.domain.perturbation import PerturbationKindTag
from gecl.domain.reports import CheckReport, Verdict
from gecl.logging_config import get_logger
from gecl.services.floquet_service import FloquetService
from gecl.services.interfaces import ExperimentContext, IExperiment

from .floquet_experiment import floquet_bump

logger = get_logger("strategy.counterexample")


class CounterexampleExperiment(IExperiment):
    """Packet amplification against μ^{ν_j}/2 and the blow-up condition."""

    requires = ('floquet',)

    @property
    def name(self) -> str:
        return "counterexample"

    @property
    def step_order(self) -> float:
        return 5.0

    def skip_reason(self, context: ExperimentContext) -> Optional[str]:
        if context.coefficient.perturbation.kind != PerturbationKindTag.COUNTEREXAMPLE:
            return "coefficient.perturbation is not 'counterexample'"
        reason = super().skip_reason(context)
        if reason:
            return reason
        if context.requested('floquet') and context.interval is None:
            return "floquet found no instability interval"
        return None

    def run(self, context: ExperimentContext) -> ExperimentResult:
        coef = context.coefficient
        service = FloquetService(context.config, context.propagator)
        interval = context.interval
        if interval is None:
            interval = service.find_instability_interval(floquet_bump(context))
            context.interval = interval

        runs = service.amplification_experiment(coef, interval)
        reports = [service.amplification_report(runs)]

        blowup = service.blowup_condition(coef, interval)
        reports.append(CheckReport(
            name='blowup',
            status=Verdict.PASS if blowup.contradiction else Verdict.FAIL,
            metrics=blowup.to_dict(),
            rows=blowup.to_rows(),
            notes=[] if blowup.contradiction else ["blow-up sequence does not tend to 0; no contradiction"],
        ))
        logger.info(f"{'✅' if blowup.contradiction else '📊'} blow-up sequence: "
                    f"decreasing={blowup.decreasing}, tends_to_zero={blowup.tends_to_zero}")
        return ExperimentResult.from_reports(self.name, reports, metrics={'interval': interval.to_dict()})
