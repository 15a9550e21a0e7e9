# gecl/services/experiments/strategies/energy_experiment.py
"""
Step 6: Energy traces for the configured Cauchy data.

Upper bound always; lower bound and scattering data only for data whose
spectral support stays away from 0; exact conservation when a ≡ 1.
"""

from gecl.config import Family
from gecl.domain.experiment import ExperimentResult
from gecl.logging_config import get_logger
from gecl.services.energy_service import EnergyService, make_cauchy_data
from gecl.services.interfaces import ExperimentContext, IExperiment

logger = get_logger("strategy.energy")


class EnergyExperiment(IExperiment):
    """Energy law at desk scale."""

    validation_gate = ('A1', 'A2')

    @property
    def name(self) -> str:
        return "energy"

    @property
    def step_order(self) -> float:
        return 6.0

    def run(self, context: ExperimentContext) -> ExperimentResult:
        coef = context.coefficient
        service = EnergyService(context.config, context.propagator)
        data = make_cauchy_data(context.config.energy)

        reports = []
        if coef.shape.family == Family.CONSTANT and not coef.has_perturbation:
            reports.append(service.check_conservation(coef, data))
        reports.append(service.verify_upper_bound(coef, data))
        if data.has_gap:
            reports.append(service.verify_lower_bound(coef, data))
            reports.append(service.scattering_check(coef, data))
        else:
            logger.info("📍 data reach |ξ| = 0: lower bound and scattering data skipped")
        reports.append(service.quadrature_convergence(coef, data))
        return ExperimentResult.from_reports(self.name, reports, metrics={'data': data.to_dict()})
