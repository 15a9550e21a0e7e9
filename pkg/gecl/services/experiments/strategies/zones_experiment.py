# gecl/services/experiments/strategies/zones_experiment.py
"""
Step 1: Zone geometry.

Boundaries t⁽¹⁾ ≤ t⁽²⁾ over the propagator frequency grid and a coarse
(t, |ξ|) map of the three zones.
"""

from collections import Counter

import numpy as np

from gecl.domain.experiment import ExperimentResult
from gecl.domain.reports import CheckReport, Verdict
from gecl.logging_config import get_logger
from gecl.services.interfaces import ExperimentContext, IExperiment
from gecl.services.zone_service import ZoneService
from gecl.utils.grids import geometric_time_grid, log_frequency_grid

logger = get_logger("strategy.zones")


class ZonesExperiment(IExperiment):
    """Boundary residuals, ordering and monotonicity, plus the zone map."""

    validation_gate = ('A1', 'A2')

    @property
    def name(self) -> str:
        return "zones"

    @property
    def step_order(self) -> float:
        return 1.0

    def run(self, context: ExperimentContext) -> ExperimentResult:
        coef = context.coefficient
        prop = context.config.propagator
        xis = log_frequency_grid(prop.xi_min, prop.xi_max, prop.xi_count)
        zones = ZoneService(coef)

        geometry = zones.check_geometry(xis)

        T = coef.shape.safe_horizon(context.config.grid.t_max)
        times = geometric_time_grid(T, prop.points_per_decade)
        rows = [
            {'xi': float(xi), 't': float(t), 'zone': zones.classify(float(t), float(xi)).zone.value}
            for xi in xis for t in times
        ]
        counts = Counter(row['zone'] for row in rows)
        zone_map = CheckReport(
            name='zone_map',
            status=Verdict.PASS,
            metrics={'points': len(rows), **{f'count_{zone}': n for zone, n in sorted(counts.items())},
                     't_max': float(T), 'xi_range': [float(np.min(xis)), float(np.max(xis))]},
            rows=rows,
        )
        logger.info(f"📍 zone map: {dict(sorted(counts.items()))}")
        return ExperimentResult.from_reports(self.name, [geometry, zone_map])
