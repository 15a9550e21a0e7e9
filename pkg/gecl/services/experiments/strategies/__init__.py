# gecl/services/experiments/strategies/__init__.py
"""
Experiment strategies, one per CLI experiment name, in execution order.
"""

from .validate_experiment import ValidateExperiment
from .zones_experiment import ZonesExperiment
from .propagate_experiment import PropagateExperiment
from .diag_experiment import DiagExperiment
from .floquet_experiment import FloquetExperiment
from .counterexample_experiment import CounterexampleExperiment
from .energy_experiment import EnergyExperiment

__all__ = [
    "ValidateExperiment",
    "ZonesExperiment",
    "PropagateExperiment",
    "DiagExperiment",
    "FloquetExperiment",
    "CounterexampleExperiment",
    "EnergyExperiment",
]
