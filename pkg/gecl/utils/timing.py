# gecl/utils/timing.py
"""
Wall-clock timing helpers for experiment runs.
"""
import functools
import time
from typing import Any, Callable, Dict, List, Optional

from ..logging_config import get_logger

logger = get_logger('timing')


class Timer:
    """
    Context manager timing a block of work.

    Usage:
        with Timer("hyperbolic sweep"):
            run_sweep()
    """

    def __init__(self, name: str, log_level: str = "INFO"):
        self.name = name
        self.log_level = log_level.lower()
        self.start_time: Optional[float] = None
        self.end_time: Optional[float] = None

    def _log(self, message: str) -> None:
        getattr(logger, self.log_level, logger.info)(message)

    def __enter__(self) -> "Timer":
        self.start_time = time.perf_counter()
        self._log(f"⏱️  START: {self.name}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> bool:
        self.end_time = time.perf_counter()
        if exc_type is not None:
            logger.error(
                f"❌ FAILED: {self.name} (after {self.elapsed:.2f}s) - {exc_type.__name__}: {exc_val}"
            )
        else:
            self._log(f"✅ DONE: {self.name} ({self.elapsed:.2f}s)")
        return False

    @property
    def elapsed(self) -> float:
        """Elapsed seconds (running value while inside the block)."""
        if self.start_time is None:
            return 0.0
        end = self.end_time if self.end_time is not None else time.perf_counter()
        return end - self.start_time


def timed(name: Optional[str] = None, log_level: str = "DEBUG"):
    """
    Decorator timing every call of a function.

    Args:
        name: Optional custom name for the operation
        log_level: Log level for timing messages (default: DEBUG)
    """
    def decorator(func: Callable) -> Callable:
        operation_name = name or func.__name__

        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            with Timer(operation_name, log_level):
                return func(*args, **kwargs)

        return wrapper
    return decorator


class PhaseTimer:
    """
    Timer for a multi-phase run (one checkpoint per experiment).

    Usage:
        timer = PhaseTimer("gecl run")
        timer.checkpoint("validate")
        timer.finish()
    """

    def __init__(self, operation_name: str):
        self.operation_name = operation_name
        self.start_time = time.perf_counter()
        self.last_checkpoint = self.start_time
        self.checkpoints: List[Dict[str, Any]] = []
        logger.info(f"🚀 BEGIN: {operation_name}")

    def checkpoint(self, phase_name: str) -> float:
        """
        Record the end of a phase.

        Args:
            phase_name: Name of the phase being completed

        Returns:
            Seconds since the previous checkpoint
        """
        now = time.perf_counter()
        since_last = now - self.last_checkpoint
        total = now - self.start_time
        self.checkpoints.append({
            'name': phase_name,
            'elapsed_since_last': since_last,
            'elapsed_total': total,
        })
        logger.info(
            f"📍 CHECKPOINT: {self.operation_name} → {phase_name} "
            f"(+{since_last:.2f}s, total: {total:.2f}s)"
        )
        self.last_checkpoint = now
        return since_last

    def finish(self) -> Dict[str, Any]:
        """
        Log the phase breakdown.

        Returns:
            Dictionary with total time and checkpoints
        """
        total = time.perf_counter() - self.start_time
        logger.info(f"🏁 FINISH: {self.operation_name} (total: {total:.2f}s)")
        if self.checkpoints:
            logger.info("📊 Phase breakdown:")
            for cp in self.checkpoints:
                share = 100.0 * cp['elapsed_since_last'] / total if total > 0 else 0.0
                logger.info(f"   • {cp['name']}: {cp['elapsed_since_last']:.2f}s ({share:.1f}%)")
        return {
            'operation': self.operation_name,
            'total_time': total,
            'checkpoints': self.checkpoints,
        }
