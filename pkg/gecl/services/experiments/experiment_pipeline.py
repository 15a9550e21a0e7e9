# gecl/services/experiments/experiment_pipeline.py
"""
Experiment pipeline coordinator.

Runs the requested strategies in step order. A strategy whose
prerequisites did not hold is recorded as skipped; an exception inside a
strategy is recorded as an error and never stops the remaining
experiments.
"""

import time
from typing import Callable, Dict, List, Optional, Sequence

from gecl.domain.experiment import ExperimentResult, ExperimentStatus
from gecl.logging_config import get_logger
from gecl.services.interfaces import ExperimentContext, IExperiment

logger = get_logger("experiments.pipeline")

STATUS_ICONS = {
    ExperimentStatus.PASS: "✅",
    ExperimentStatus.MARGINAL: "⚠️",
    ExperimentStatus.FAIL: "📊",
    ExperimentStatus.ERROR: "❌",
    ExperimentStatus.SKIPPED: "⚠️",
}


class ExperimentPipeline:
    """
    Coordinates experiment strategies.

    Example usage:
        pipeline = ExperimentPipeline.create_default()
        results = pipeline.run(context, ["validate", "energy"])
    """

    def __init__(self, strategies: Optional[List[IExperiment]] = None) -> None:
        self._strategies: List[IExperiment] = []
        for strategy in strategies or []:
            self.add_strategy(strategy)

    def add_strategy(self, strategy: IExperiment) -> None:
        """
        Add a strategy; strategies are kept sorted by step_order.

        Raises:
            ValueError: If a strategy with the same name is already registered
        """
        if any(s.name == strategy.name for s in self._strategies):
            raise ValueError(f"experiment '{strategy.name}' registered twice")
        self._strategies.append(strategy)
        self._strategies.sort(key=lambda s: s.step_order)
        logger.debug(f"Added strategy: {strategy}")

    @property
    def strategies(self) -> List[IExperiment]:
        """Strategies in execution order."""
        return list(self._strategies)

    @property
    def names(self) -> List[str]:
        return [s.name for s in self._strategies]

    def run_one(self, strategy: IExperiment, context: ExperimentContext) -> ExperimentResult:
        """Run one strategy, turning skips and exceptions into results."""
        reason = strategy.skip_reason(context)
        if reason:
            logger.warning(f"⚠️ skipping {strategy.name}: {reason}")
            return ExperimentResult.skipped(strategy.name, reason)

        logger.info(f"🚀 EXPERIMENT: {strategy.name}")
        start = time.perf_counter()
        try:
            result = strategy.run(context)
        except Exception as e:
            logger.error(f"❌ {strategy.name} failed: {type(e).__name__}: {e}", exc_info=True)
            result = ExperimentResult.error(strategy.name, e)
        result.elapsed = time.perf_counter() - start
        logger.info(f"{STATUS_ICONS[result.status]} {strategy.name}: {result.status.value} "
                    f"({result.elapsed:.2f}s)")
        return result

    def run(
        self,
        context: ExperimentContext,
        names: Sequence[str],
        on_result: Optional[Callable[[ExperimentResult], None]] = None,
    ) -> Dict[str, ExperimentResult]:
        """
        Run the named experiments in step order.

        Args:
            context: Shared context; results are also stored in ``context.results``
            names: Experiment names to run (order is ignored)
            on_result: Called after every experiment, e.g. to write its artifacts

        Returns:
            Mapping name -> ExperimentResult in execution order

        Raises:
            ValueError: For a name without a registered strategy
        """
        unknown = sorted(set(names) - set(self.names))
        if unknown:
            raise ValueError(f"no strategy for experiment(s): {', '.join(unknown)}")

        results: Dict[str, ExperimentResult] = {}
        for strategy in self._strategies:
            if strategy.name not in names:
                continue
            result = self.run_one(strategy, context)
            context.results[strategy.name] = result
            results[strategy.name] = result
            if on_result is not None:
                on_result(result)
        return results

    @classmethod
    def create_default(cls) -> "ExperimentPipeline":
        """Pipeline with all standard strategies."""
        from .strategies import (
            CounterexampleExperiment,
            DiagExperiment,
            EnergyExperiment,
            FloquetExperiment,
            PropagateExperiment,
            ValidateExperiment,
            ZonesExperiment,
        )

        return cls([
            ValidateExperiment(),
            ZonesExperiment(),
            PropagateExperiment(),
            DiagExperiment(),
            FloquetExperiment(),
            CounterexampleExperiment(),
            EnergyExperiment(),
        ])

    def __repr__(self) -> str:
        return f"ExperimentPipeline([{', '.join(f'{s.name}({s.step_order})' for s in self._strategies)}])"
