# gecl/services/experiments/strategies/floquet_experiment.py
"""
Step 4: Hill-system monodromy.

Sweeps X(λ̃) over the search range, locates and shrinks an instability
interval and checks X(λ̃)ⁿ against one long integration. The interval is
handed to the counterexample experiment through the context.
"""

from gecl.domain.experiment import ExperimentResult
from gecl.domain.perturbation import BumpProfile, PerturbationKindTag
from gecl.domain.reports import CheckReport, Verdict
from gecl.logging_config import get_logger
from gecl.services.coefficient_service import make_bump_from_config
from gecl.services.floquet_service import FloquetService, NoInstabilityFoundError
from gecl.services.interfaces import ExperimentContext, IExperiment

logger = get_logger("strategy.floquet")

#: Smallest max-modulus inside the shrunk interval that counts as a clear instability
MU_MIN_TARGET = 1.01


def floquet_bump(context: ExperimentContext) -> BumpProfile:
    """Bump of the counterexample coefficient, or the configured bump otherwise."""
    pert = context.coefficient.perturbation
    if pert.kind == PerturbationKindTag.COUNTEREXAMPLE:
        return pert.bump
    return make_bump_from_config(context.config.coefficient.bump)


class FloquetExperiment(IExperiment):
    """Monodromy sweep and instability interval."""

    @property
    def name(self) -> str:
        return "floquet"

    @property
    def step_order(self) -> float:
        return 4.0

    def run(self, context: ExperimentContext) -> ExperimentResult:
        service = FloquetService(context.config, context.propagator)
        bump = floquet_bump(context)

        reports = [service.sweep_report(service.sweep(bump))]
        try:
            interval = service.find_instability_interval(bump)
        except NoInstabilityFoundError as e:
            logger.warning(f"⚠️ {e}")
            reports.append(CheckReport(name='instability', status=Verdict.FAIL, notes=[str(e)]))
            return ExperimentResult.from_reports(self.name, reports)

        context.interval = interval
        if interval.mu_min > MU_MIN_TARGET:
            status = Verdict.PASS
        elif interval.mu_min > 1.0:
            status = Verdict.MARGINAL
        else:
            status = Verdict.FAIL
        reports.append(CheckReport(
            name='instability',
            status=status,
            metrics={**interval.to_dict(), 'width': interval.width, 'target': MU_MIN_TARGET},
            rows=[interval.to_dict()],
        ))
        reports.append(service.power_consistency(bump, interval.midpoint))
        return ExperimentResult.from_reports(self.name, reports)
