# gecl/services/integrator.py
"""
Embedded Runge-Kutta 4(5) integrator for batched linear systems.

Dormand-Prince coefficients, fifth-order propagation with the embedded
fourth-order solution as error estimate, PI step-size control, and an
optional step cap that keeps the step below a fraction of the local
oscillation period. The state is a stack of shape (n, ...) where the
leading axis indexes independent problems (one per frequency); each
problem is rescaled separately once its entries exceed a threshold, with
the removed factor accumulated in log form.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from ..config import IntegratorConfig
from ..logging_config import get_logger

logger = get_logger('integrator')

RHS = Callable[[float, np.ndarray], np.ndarray]
StepCap = Callable[[float], float]


class IntegrationError(Exception):
    """Raised when an integration cannot be completed."""
    pass


class StepSizeUnderflowError(IntegrationError):
    """Raised when the requested tolerance needs a step below machine resolution."""

    def __init__(self, t: float, h: float):
        super().__init__(f"step size underflow at t={t:.17g} (h={h:.3e})")
        self.t = t
        self.h = h


class IntegrationDivergedError(IntegrationError):
    """Raised when the solution stops being finite."""

    def __init__(self, t: float):
        super().__init__(f"non-finite solution at t={t:.17g}")
        self.t = t


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# difference of the fifth- and fourth-order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_PI_ALPHA = 0.7 / 5.0
_PI_BETA = 0.4 / 5.0


@dataclass
class IntegrationResult:
    """
    States at the requested output times.

    Attributes:
        times: Output times in the order requested
        states: Rescaled states, shape (T,) + y0.shape
        log_scale: Accumulated log factors per problem, shape (T, n)
        steps: Accepted steps
        rejected: Rejected steps
        max_error: Largest accepted scaled error estimate
    """
    times: np.ndarray
    states: np.ndarray
    log_scale: np.ndarray
    steps: int = 0
    rejected: int = 0
    max_error: float = 0.0
    stats: Dict[str, float] = field(default_factory=dict)


class DormandPrince45:
    """
    Adaptive DOPRI5 with exact landing on breakpoints and output times.

    Usage:
        solver = DormandPrince45(config.integrator)
        result = solver.solve(rhs, y0, t0=0.0, times=[1.0, 2.0])
    """

    def __init__(self, config: Optional[IntegratorConfig] = None, tol: Optional[float] = None):
        self.config = config or IntegratorConfig()
        self.tol = float(tol if tol is not None else self.config.tol)
        if not 1e-14 <= self.tol <= 1e-2:
            raise IntegrationError(f"tolerance {self.tol:g} outside [1e-14, 1e-2]")

    def _error_norm(self, err: np.ndarray, y: np.ndarray, y_new: np.ndarray) -> float:
        # mixed absolute/relative scale: per-problem magnitude plus per-entry magnitude
        mag = np.maximum(np.abs(y), np.abs(y_new))
        axes = tuple(range(1, y.ndim))
        item = np.max(mag, axis=axes, keepdims=True) if axes else mag
        scale = self.tol * (item + mag) + 1e-300
        ratio = np.abs(err) / scale
        return float(np.sqrt(np.mean(ratio * ratio)))

    def _initial_step(self, f0: np.ndarray, y0: np.ndarray, span: float, cap: float) -> float:
        d0 = float(np.max(np.abs(y0)))
        d1 = float(np.max(np.abs(f0)))
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
        return min(h, cap, span)

    def solve(
        self,
        rhs: RHS,
        y0: np.ndarray,
        t0: float,
        times: Sequence[float],
        step_cap: Optional[StepCap] = None,
        breakpoints: Optional[Sequence[float]] = None,
    ) -> IntegrationResult:
        """
        Integrate y' = rhs(t, y) from t0 through all output times.

        Args:
            rhs: Right-hand side, linear in y
            y0: Initial state, shape (n, ...)
            t0: Initial time
            times: Output times, monotone in one direction from t0
            step_cap: Optional upper bound on |h| as a function of t
            breakpoints: Points where the coefficients lose smoothness;
                steps never cross them

        Returns:
            IntegrationResult with one state per output time

        Raises:
            StepSizeUnderflowError: If the tolerance cannot be met
            IntegrationDivergedError: If the state becomes non-finite
            IntegrationError: If the step budget is exhausted
        """
        times = np.asarray(times, dtype=float)
        y = np.array(y0, dtype=complex)
        n = y.shape[0]
        out_states = np.empty((len(times),) + y.shape, dtype=complex)
        out_log = np.zeros((len(times), n))
        log_scale = np.zeros(n)
        if len(times) == 0:
            return IntegrationResult(times, out_states, out_log)

        direction = 1.0 if times[-1] >= t0 else -1.0
        if np.any(direction * np.diff(np.concatenate([[t0], times])) < 0):
            raise IntegrationError("output times must be monotone in the direction of integration")

        stops = sorted(
            set(times.tolist()) | {
                float(b) for b in (breakpoints or ())
                if min(t0, times[-1]) < b < max(t0, times[-1])
            },
            key=lambda v: direction * v,
        )
        renorm = self.config.renormalize_above
        steps = rejected = 0
        max_error = 0.0
        err_prev = 1e-4
        nonfinite_seen = False
        t = float(t0)
        k1 = rhs(t, y)
        cap = step_cap(t) if step_cap else math.inf
        h_abs = self._initial_step(k1, y, abs(times[-1] - t0) or 1.0, cap)
        out_index = 0

        # outputs that coincide with t0
        while out_index < len(times) and times[out_index] == t:
            out_states[out_index] = y
            out_index += 1

        for stop in stops:
            while direction * (stop - t) > 0:
                cap = step_cap(t) if step_cap else math.inf
                remaining = abs(stop - t)
                if remaining <= 4.0 * np.finfo(float).eps * max(1.0, abs(t)):
                    t = stop
                    break
                h_abs = min(h_abs, cap)
                landing = h_abs >= remaining * (1.0 - 1e-12)
                h_step = remaining if landing else h_abs
                if h_step < 16.0 * np.finfo(float).eps * max(1.0, abs(t)):
                    if nonfinite_seen:
                        raise IntegrationDivergedError(t)
                    raise StepSizeUnderflowError(t, h_step)
                h = direction * h_step

                stages = [k1]
                for i in range(1, 7):
                    incr = sum(a * k for a, k in zip(_A[i], stages) if a != 0.0)
                    stages.append(rhs(t + _C[i] * h, y + h * incr))
                y_new = y + h * sum(a * k for a, k in zip(_A[6], stages[:6]) if a != 0.0)
                k7 = stages[6]  # FSAL: equals rhs(t + h, y_new)
                err = h * sum(e * k for e, k in zip(_E, stages) if e != 0.0)
                err_norm = self._error_norm(err, y, y_new)

                if not np.isfinite(err_norm):
                    nonfinite_seen = True
                    rejected += 1
                    h_abs = h_step * _MIN_FACTOR
                    continue
                if err_norm > 1.0:
                    rejected += 1
                    h_abs = h_step * max(_MIN_FACTOR, self.config.safety * err_norm ** -0.2)
                    continue

                steps += 1
                if steps > self.config.max_steps:
                    raise IntegrationError(f"step budget {self.config.max_steps} exhausted at t={t:.6g}")
                max_error = max(max_error, err_norm)
                t = stop if landing else t + h
                y = y_new
                k1 = k7

                big = np.max(np.abs(y).reshape(n, -1), axis=1)
                over = big > renorm
                if np.any(over):
                    factor = np.where(over, big, 1.0)
                    shape = (n,) + (1,) * (y.ndim - 1)
                    y = y / factor.reshape(shape)
                    k1 = k1 / factor.reshape(shape)
                    log_scale = log_scale + np.log(factor)
                    logger.debug(f"renormalised {int(np.sum(over))} problem(s) at t={t:.6g}")

                if err_norm == 0.0:
                    factor = _MAX_FACTOR
                else:
                    factor = self.config.safety * err_norm ** -_PI_ALPHA * err_prev ** _PI_BETA
                    factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
                err_prev = max(err_norm, 1e-4)
                if not landing:
                    h_abs = h_step * factor

            while out_index < len(times) and times[out_index] == t:
                out_states[out_index] = y
                out_log[out_index] = log_scale
                out_index += 1

        if not np.all(np.isfinite(y)):
            raise IntegrationDivergedError(t)
        return IntegrationResult(
            times=times, states=out_states, log_scale=out_log,
            steps=steps, rejected=rejected, max_error=max_error,
            stats={'steps': steps, 'rejected': rejected, 'max_error': max_error},
        )
