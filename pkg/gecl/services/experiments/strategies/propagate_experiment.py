# gecl/services/experiments/strategies/propagate_experiment.py
"""
Step 2: Fundamental solutions and the zone-wise estimates.

- Liouville survey over all zones
- adaptive integrator against the Peano-Baker oracle
- cocycle property
- two-sided estimate for ω ≡ 1 above t⁽¹⁾
- entrywise bounds in the pseudo-differential zone
- two-sided estimate in the hyperbolic zone
- stabilisation in the intermediate zone
- the optional batch manifest
"""

import numpy as np

from gecl.domain.experiment import ExperimentResult
from gecl.domain.reports import CheckReport, Verdict
from gecl.logging_config import get_logger
from gecl.services.interfaces import ExperimentContext, IExperiment

logger = get_logger("strategy.propagate")

ORACLE_STREAM = 1


class PropagateExperiment(IExperiment):
    """Propagator verification runs."""

    validation_gate = ('A1', 'A2')

    @property
    def name(self) -> str:
        return "propagate"

    @property
    def step_order(self) -> float:
        return 2.0

    def run(self, context: ExperimentContext) -> ExperimentResult:
        coef = context.coefficient
        service = context.propagator
        prop = context.config.propagator

        reports = [
            service.liouville_survey(coef),
            service.check_oracle(coef, rng=context.rng(ORACLE_STREAM)),
        ]
        xi_mid = float(np.sqrt(prop.xi_min * prop.xi_max))
        reports.append(service.check_cocycle(coef, xi_mid, 0.0, 1.0, 3.0))
        reports.append(service.verify_lambda_two_sided(coef.shape, coef.scales))
        reports.append(service.verify_pd_zone(coef))
        reports.append(service.verify_hyp_zone(coef))
        reports.append(service.verify_int_zone(coef))

        if prop.tasks:
            rows = service.run_tasks(coef, prop.tasks)
            reports.append(CheckReport(
                name='tasks',
                status=Verdict.PASS,
                metrics={'count': len(rows), 'max_det_err': max(r['det_err'] for r in rows)},
                rows=rows,
            ))
            logger.info(f"📊 {len(rows)} manifest task(s) integrated")

        return ExperimentResult.from_reports(self.name, reports)
