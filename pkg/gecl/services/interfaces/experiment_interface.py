# gecl/services/interfaces/experiment_interface.py
"""
Abstract base class and context for experiment strategies.

The batch runner uses a Strategy pattern where every CLI experiment
(validate, zones, propagate, diag, floquet, counterexample, energy) is a
separate strategy class. The pipeline orders them, checks their
prerequisites against earlier results and records one ExperimentResult
per strategy.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Optional, Tuple

import numpy as np

from gecl.domain.experiment import ExperimentResult, ExperimentStatus
from gecl.domain.reports import Verdict

if TYPE_CHECKING:
    from gecl.config import AppConfig
    from gecl.domain.coefficient import Coefficient
    from gecl.domain.floquet import InstabilityInterval
    from gecl.domain.reports import ValidationReport
    from gecl.services.propagator_service import PropagatorService


@dataclass
class ExperimentContext:
    """
    Shared state passed to all experiment strategies.

    Attributes:
        config: Experiment configuration
        coefficient: The coefficient a(t) every experiment works on
        results: Results of the experiments executed so far, by name
        validation: Assumption report of the validate experiment
        interval: Instability interval found by the floquet experiment
    """

    config: "AppConfig"
    coefficient: "Coefficient"
    results: Dict[str, ExperimentResult] = field(default_factory=dict)

    # Filled in by strategies for their dependents
    validation: Optional["ValidationReport"] = None
    interval: Optional["InstabilityInterval"] = None

    _propagator: Optional["PropagatorService"] = field(default=None, repr=False)

    @property
    def propagator(self) -> "PropagatorService":
        """One PropagatorService shared by all strategies."""
        if self._propagator is None:
            from gecl.services.propagator_service import PropagatorService
            self._propagator = PropagatorService(self.config)
        return self._propagator

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Generator seeded from the config seed; each stream is independent of run order."""
        return np.random.default_rng([self.config.seed, stream])

    def requested(self, name: str) -> bool:
        return name in self.config.experiment_list()

    def status_of(self, name: str) -> Optional[ExperimentStatus]:
        result = self.results.get(name)
        return result.status if result else None


class IExperiment(ABC):
    """
    Abstract base class for experiment strategies.

    Example implementation:
        class ZonesExperiment(IExperiment):
            @property
            def name(self) -> str:
                return "zones"

            @property
            def step_order(self) -> float:
                return 1.0

            def run(self, context: ExperimentContext) -> ExperimentResult:
                report = ZoneService(context.coefficient).check_geometry(xis)
                return ExperimentResult.from_reports(self.name, [report])
    """

    #: Experiments that must have executed (not error, not skipped) when requested in the same run
    requires: Tuple[str, ...] = ()

    #: Assumption checks that must not FAIL when the validate experiment ran before this one
    validation_gate: Tuple[str, ...] = ()

    @property
    @abstractmethod
    def name(self) -> str:
        """
        Experiment name as used on the command line.

        Returns:
            One of ``gecl.config.EXPERIMENT_NAMES``
        """
        pass

    @property
    @abstractmethod
    def step_order(self) -> float:
        """
        Numeric order for pipeline execution.

        Standard ordering:
        - 0.0: validate
        - 1.0: zones
        - 2.0: propagate
        - 3.0: diag
        - 4.0: floquet
        - 5.0: counterexample
        - 6.0: energy

        Returns:
            Numeric order value
        """
        pass

    def skip_reason(self, context: ExperimentContext) -> Optional[str]:
        """
        Why this experiment cannot run in the given context.

        The default checks ``requires`` against earlier results. Override to
        add domain preconditions.

        Args:
            context: Experiment context with earlier results

        Returns:
            Reason string, or None when the experiment should run
        """
        for prerequisite in self.requires:
            status = context.status_of(prerequisite)
            if status in (ExperimentStatus.ERROR, ExperimentStatus.SKIPPED):
                return f"prerequisite '{prerequisite}' did not execute ({status.value})"
        if self.validation_gate and context.status_of('validate') == ExperimentStatus.ERROR:
            return "prerequisite 'validate' did not execute (error)"
        if context.validation is not None:
            failed = [name for name in self.validation_gate
                      if context.validation.status(name) == Verdict.FAIL]
            if failed:
                return f"coefficient fails {', '.join(failed)}"
        return None

    @abstractmethod
    def run(self, context: ExperimentContext) -> ExperimentResult:
        """
        Execute the experiment.

        Args:
            context: Experiment context; strategies may store values for dependents

        Returns:
            ExperimentResult with the check reports
        """
        pass

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(step={self.step_order}, name='{self.name}')"
