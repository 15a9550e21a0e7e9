# gecl/domain/experiment.py
"""
Outcome of one named experiment of a batch run.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from .reports import CheckReport, Verdict, combine, jsonable


class ExperimentStatus(str, Enum):
    """
    Summary status of an experiment.

    PASS / MARGINAL / FAIL are findings; ERROR means the experiment could
    not be executed and SKIPPED that a prerequisite did not hold.
    """
    PASS = "pass"
    MARGINAL = "marginal"
    FAIL = "fail"
    ERROR = "error"
    SKIPPED = "skipped"

    @classmethod
    def from_verdict(cls, verdict: Verdict) -> "ExperimentStatus":
        return cls(verdict.value)


@dataclass
class ExperimentResult:
    """
    Reports of one experiment plus its execution status.

    Attributes:
        name: Experiment name (validate, zones, ...)
        status: Summary status
        reports: Check reports in execution order
        message: Error text or skip reason
        metrics: Experiment-level values that are not tied to one report
        elapsed: Wall time in seconds
    """
    name: str
    status: ExperimentStatus
    reports: List[CheckReport] = field(default_factory=list)
    message: Optional[str] = None
    metrics: Dict[str, Any] = field(default_factory=dict)
    elapsed: float = 0.0

    @classmethod
    def from_reports(cls, name: str, reports: List[CheckReport], **kwargs: Any) -> "ExperimentResult":
        status = ExperimentStatus.from_verdict(combine([r.status for r in reports])) if reports \
            else ExperimentStatus.PASS
        return cls(name=name, status=status, reports=reports, **kwargs)

    @classmethod
    def skipped(cls, name: str, reason: str) -> "ExperimentResult":
        return cls(name=name, status=ExperimentStatus.SKIPPED, message=reason)

    @classmethod
    def error(cls, name: str, exc: BaseException) -> "ExperimentResult":
        return cls(name=name, status=ExperimentStatus.ERROR, message=f"{type(exc).__name__}: {exc}")

    @property
    def executed(self) -> bool:
        return self.status not in (ExperimentStatus.ERROR, ExperimentStatus.SKIPPED)

    def report(self, name: str) -> Optional[CheckReport]:
        for report in self.reports:
            if report.name == name:
                return report
        return None

    def rows(self) -> List[Dict[str, Any]]:
        """All sample rows, tagged with the check they back."""
        return [{'check': report.name, **row} for report in self.reports for row in report.rows]

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            'status': self.status.value,
            'elapsed_s': round(self.elapsed, 3),
            'checks': {report.name: report.to_dict() for report in self.reports},
        }
        if self.message:
            out['message'] = self.message
        if self.metrics:
            out['metrics'] = jsonable(self.metrics)
        return out
