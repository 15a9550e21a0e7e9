# gecl/domain/reports.py
"""
Report types shared by all experiments, plus the verdict rules for
numerically certified "≲" / "≈" statements.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np


class Verdict(str, Enum):
    """Outcome of a numerical certification."""
    PASS = "pass"
    FAIL = "fail"
    MARGINAL = "marginal"


# A growing tail keeps at least this share of its first log-increment.
MIN_PACE = 0.5


def last_decade_mask(t, t_end: Optional[float] = None) -> np.ndarray:
    """Points with 1+t within a factor 10 of 1+t_end."""
    t = np.asarray(t, dtype=float)
    t_end = float(t[-1]) if t_end is None else t_end
    return (1.0 + t) * 10.0 >= (1.0 + t_end)


def decade_bins(t) -> np.ndarray:
    """Decade index of every point, counted back from the right end (0 = last decade)."""
    t = np.asarray(t, dtype=float)
    return np.floor(np.log10((1.0 + t[-1]) / (1.0 + t))).astype(int)


def growth_witness(
    series: Sequence[float],
    min_run: int = 4,
    factor: float = 2.0,
    min_pace: float = MIN_PACE,
) -> bool:
    """
    True if the tail of ``series`` keeps growing.

    The last ``min_run`` values must be positive and strictly increasing,
    the last one must exceed ``factor`` times the first, and the growth
    must not stall: the last log-increment keeps at least ``min_pace`` of
    the first. A series converging from below, or climbing off 0, is not
    a witness.
    """
    values = np.asarray([v for v in series if np.isfinite(v)], dtype=float)
    if values.size < min_run:
        return False
    tail = values[-min_run:]
    if tail[0] <= 0.0:
        return False
    if not (np.all(np.diff(tail) > 0) and tail[-1] > factor * tail[0]):
        return False
    steps = np.diff(np.log(tail))
    return bool(steps[-1] >= min_pace * steps[0])


def sup_verdict(
    t,
    values,
    packet_sups: Optional[Sequence[float]] = None,
) -> Tuple[Verdict, Dict[str, Any]]:
    """
    Verdict for "sup_t values(t) < ∞" from samples.

    Fail when the samples are non-finite or a growth witness is found
    (per-decade suprema, or per-packet suprema when given). Pass otherwise:
    the last-decade supremum then stays within the global one, and its
    share is recorded as ``tail_share``. Marginal when there are no samples.

    Returns:
        (verdict, info) where info holds sup, worst point and decade sups
    """
    t = np.asarray(t, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    info: Dict[str, Any] = {}
    if values.size == 0:
        return Verdict.MARGINAL, {'sup': float('nan'), 'worst_t': float('nan')}

    if not np.all(np.isfinite(values)):
        bad = int(np.argmax(~np.isfinite(values)))
        return Verdict.FAIL, {'sup': float('inf'), 'worst_t': float(t[bad])}

    worst = int(np.argmax(values))
    info['sup'] = float(values[worst])
    info['worst_t'] = float(t[worst])

    bins = decade_bins(t)
    decade_sups = [float(np.max(values[bins == b])) for b in sorted(set(bins.tolist()), reverse=True)]
    info['decade_sups'] = decade_sups

    if packet_sups is not None and growth_witness(packet_sups):
        info['witness'] = 'packet'
        info['packet_sups'] = [float(v) for v in packet_sups]
        return Verdict.FAIL, info
    if growth_witness(decade_sups):
        info['witness'] = 'decade'
        return Verdict.FAIL, info

    sup_tail = float(np.max(values[last_decade_mask(t)]))
    info['tail_share'] = sup_tail / info['sup'] if info['sup'] > 0 else 1.0
    return Verdict.PASS, info


def inf_verdict(t, values) -> Tuple[Verdict, Dict[str, Any]]:
    """
    Verdict for "inf_t values(t) > 0".

    Fail on a non-positive sample or when the per-decade infima keep
    falling (a growth witness of their reciprocals). Pass otherwise, with
    the global infimum over the last-decade one recorded as ``tail_share``.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return Verdict.MARGINAL, {'inf': float('nan'), 'worst_t': float('nan')}
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        bad = ~np.isfinite(values) | (values <= 0)
        worst = int(np.argmax(bad))
        return Verdict.FAIL, {'inf': float(values[worst]), 'worst_t': float(t[worst])}

    worst = int(np.argmin(values))
    info: Dict[str, Any] = {'inf': float(values[worst]), 'worst_t': float(t[worst])}
    bins = decade_bins(t)
    decade_infs = [float(np.min(values[bins == b])) for b in sorted(set(bins.tolist()), reverse=True)]
    info['decade_infs'] = decade_infs
    if growth_witness([1.0 / v for v in decade_infs]):
        info['witness'] = 'decade'
        return Verdict.FAIL, info

    inf_tail = float(np.min(values[last_decade_mask(t)]))
    info['tail_share'] = info['inf'] / inf_tail
    return Verdict.PASS, info


def running_max_drift(t, values) -> float:
    """Relative growth of the running maximum across the last decade of t."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    running = np.maximum.accumulate(values)
    tail = last_decade_mask(t)
    if np.all(tail) or not np.any(tail):
        return 0.0
    before = running[~tail][-1]
    return float(running[-1] / before - 1.0) if before > 0 else float('inf')


def combine(verdicts: Sequence[Verdict]) -> Verdict:
    """Fail beats marginal beats pass."""
    if Verdict.FAIL in verdicts:
        return Verdict.FAIL
    if Verdict.MARGINAL in verdicts:
        return Verdict.MARGINAL
    return Verdict.PASS


@dataclass
class CheckReport:
    """
    Outcome of one certification with its witness constants.

    Attributes:
        name: Short identifier (e.g. 'A1', 'hyp_zone')
        status: Verdict
        metrics: Witness constants and statistics
        rows: Underlying samples (exported as CSV)
        notes: Human-readable remarks
    """
    name: str
    status: Verdict
    metrics: Dict[str, Any] = field(default_factory=dict)
    rows: List[Dict[str, Any]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == Verdict.PASS

    def to_dict(self) -> Dict[str, Any]:
        """Summary form without the sample rows."""
        return {
            'name': self.name,
            'status': self.status.value,
            'metrics': jsonable(self.metrics),
            'notes': list(self.notes),
        }


@dataclass
class TwoSidedReport(CheckReport):
    """Ratio statistic R with 1/C ≤ R ≤ C and last-decade drift."""
    min_ratio: float = float('nan')
    max_ratio: float = float('nan')
    constant: float = float('nan')
    drift: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        out = super().to_dict()
        out['metrics'].update(jsonable({
            'min_ratio': self.min_ratio,
            'max_ratio': self.max_ratio,
            'constant': self.constant,
            'drift': self.drift,
        }))
        return out


@dataclass
class EntryBoundReport(CheckReport):
    """Smallest admissible constants C per matrix entry."""
    backward: Dict[str, float] = field(default_factory=dict)
    forward: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        out = super().to_dict()
        out['metrics'].update(jsonable({'backward': self.backward, 'forward': self.forward}))
        return out


@dataclass
class StabilisationReport(CheckReport):
    """sup ‖Q‖, sup ‖Q⁻¹‖ and det Q over the intermediate zone."""
    sup_q: float = float('nan')
    sup_q_inverse: float = float('nan')
    det_error: float = float('nan')

    def to_dict(self) -> Dict[str, Any]:
        out = super().to_dict()
        out['metrics'].update(jsonable({
            'sup_q': self.sup_q,
            'sup_q_inverse': self.sup_q_inverse,
            'det_error': self.det_error,
        }))
        return out


@dataclass
class ValidationReport:
    """
    Assumption checks for one coefficient.

    Attributes:
        checks: Mapping assumption name -> CheckReport
        grid: Description of the sample grid
    """
    checks: Dict[str, CheckReport] = field(default_factory=dict)
    grid: Dict[str, Any] = field(default_factory=dict)

    def add(self, report: CheckReport) -> None:
        self.checks[report.name] = report

    def merge(self, other: "ValidationReport") -> "ValidationReport":
        self.checks.update(other.checks)
        self.grid.update(other.grid)
        return self

    def status(self, name: str) -> Optional[Verdict]:
        report = self.checks.get(name)
        return report.status if report else None

    def all_pass(self, names: Sequence[str]) -> bool:
        return all(self.status(name) == Verdict.PASS for name in names)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'grid': jsonable(self.grid),
            'checks': {name: report.to_dict() for name, report in self.checks.items()},
        }

    def rows(self) -> List[Dict[str, Any]]:
        out = []
        for name, report in self.checks.items():
            for row in report.rows:
                out.append({'assumption': name, **row})
        return out


def jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if np.isfinite(v) else str(v)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    return value
