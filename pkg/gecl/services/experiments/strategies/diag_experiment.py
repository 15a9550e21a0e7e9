# gecl/services/experiments/strategies/diag_experiment.py
"""
Step 3: Diagonalization hierarchy in the hyperbolic zone.
"""

import numpy as np

from gecl.domain.experiment import ExperimentResult
from gecl.services.diagonalizer_service import DiagonalizerService
from gecl.services.interfaces import ExperimentContext, IExperiment


class DiagExperiment(IExperiment):
    """Imaginary parts, symbol decay, factorisation bounds and the Q(t) ladder."""

    validation_gate = ('A1', 'A2')

    @property
    def name(self) -> str:
        return "diag"

    @property
    def step_order(self) -> float:
        return 3.0

    def run(self, context: ExperimentContext) -> ExperimentResult:
        coef = context.coefficient
        service = DiagonalizerService(context.config)
        prop = context.config.propagator
        xi = float(np.sqrt(prop.xi_min * prop.xi_max))

        points = service.sample_points(coef)
        reports = [
            service.check_imaginary_parts(coef, points=points),
            service.check_symbol_decay(coef, points=points),
            service.check_operator_identity(coef, points=points),
            service.propagator_consistency(coef, xi),
            service.q_convergence(coef.shape, coef.scales, xi),
        ]
        return ExperimentResult.from_reports(self.name, reports)
