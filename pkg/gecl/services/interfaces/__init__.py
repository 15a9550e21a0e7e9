# gecl/services/interfaces/__init__.py
"""
Service interfaces for the experiment runner.

Defines the experiment strategy ABC and the context shared between
strategies, so strategies can be tested on their own and the pipeline
can be assembled from any subset of them.
"""

from .experiment_interface import (
    ExperimentContext,
    IExperiment,
)

__all__ = [
    "ExperimentContext",
    "IExperiment",
]
