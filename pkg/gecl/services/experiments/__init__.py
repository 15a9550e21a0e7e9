# gecl/services/experiments/__init__.py
"""
Experiment runner implementing the Strategy pattern.

Strategies (in execution order):
- validate: assumption certification
- zones: zone boundaries and zone map
- propagate: fundamental solutions and zone-wise estimates
- diag: diagonalization hierarchy
- floquet: Hill monodromy and instability interval
- counterexample: packet amplification and blow-up condition
- energy: energy traces, two-sided bounds and scattering data
"""

from .experiment_pipeline import ExperimentPipeline
from .strategies import (
    CounterexampleExperiment,
    DiagExperiment,
    EnergyExperiment,
    FloquetExperiment,
    PropagateExperiment,
    ValidateExperiment,
    ZonesExperiment,
)

__all__ = [
    "ExperimentPipeline",
    "ValidateExperiment",
    "ZonesExperiment",
    "PropagateExperiment",
    "DiagExperiment",
    "FloquetExperiment",
    "CounterexampleExperiment",
    "EnergyExperiment",
]
