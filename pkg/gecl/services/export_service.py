# gecl/services/export_service.py
"""
Service for exporting experiment results: one CSV per experiment, the
JSON summary and an optional Excel workbook.
"""
import json
import re
from io import BytesIO
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

import pandas as pd

from ..config import CONFIG_SCHEMA_VERSION, AppConfig, config_to_dict
from ..domain.coefficient import Coefficient
from ..domain.experiment import ExperimentResult, ExperimentStatus
from ..domain.reports import jsonable
from ..logging_config import get_logger

logger = get_logger('export_service')

SUMMARY_SCHEMA = "gecl.summary"
FLOAT_FORMAT = '%.17g'

# control characters openpyxl refuses (tab, newline and carriage return are fine)
ILLEGAL_EXCEL_CHARS = re.compile(r'[\x00-\x08\x0b-\x0c\x0e-\x1f]')


class ExportService:
    """
    Writes experiment artifacts.

    CSV bodies depend only on the computed values: header row, comma
    separator, '.' decimal and 17 significant digits.
    """

    def __init__(self, config: AppConfig):
        """
        Initialize the export service.

        Args:
            config: Experiment configuration
        """
        self.config = config

    # -- tables --------------------------------------------------------------

    def build_dataframe(self, result: ExperimentResult) -> pd.DataFrame:
        """
        All sample rows of an experiment with a leading ``check`` column.

        Args:
            result: Experiment result

        Returns:
            DataFrame (only the ``check`` column when there are no rows)
        """
        rows = result.rows()
        if not rows:
            return pd.DataFrame({'check': pd.Series([], dtype=object)})
        return pd.DataFrame(rows)

    def build_verdict_table(self, results: Mapping[str, ExperimentResult]) -> pd.DataFrame:
        """One row per experiment check with its status; skipped and failed runs get one row."""
        rows: List[Dict[str, Any]] = []
        for name, result in results.items():
            if not result.reports:
                rows.append({'experiment': name, 'check': '', 'status': result.status.value,
                             'message': result.message or ''})
            for report in result.reports:
                rows.append({'experiment': name, 'check': report.name, 'status': report.status.value,
                             'message': '; '.join(report.notes)})
        return pd.DataFrame(rows, columns=['experiment', 'check', 'status', 'message'])

    def to_csv_bytes(self, df: pd.DataFrame) -> bytes:
        """
        Export DataFrame to CSV bytes.

        Args:
            df: DataFrame to export

        Returns:
            UTF-8 CSV without index, floats at 17 significant digits
        """
        output = BytesIO()
        df.to_csv(output, sep=',', index=False, float_format=FLOAT_FORMAT,
                  encoding='utf-8', lineterminator='\n')
        return output.getvalue()

    def write_experiment(self, out_dir: Path, result: ExperimentResult) -> Path:
        """
        Write ``<name>.csv`` for one experiment.

        Returns:
            Path of the written file
        """
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f"{result.name}.csv"
        df = self.build_dataframe(result)
        path.write_bytes(self.to_csv_bytes(df))
        logger.info(f"💾 {path.name}: {len(df)} rows")
        return path

    # -- summary -------------------------------------------------------------

    def build_summary(
        self,
        results: Mapping[str, ExperimentResult],
        coefficient: Optional[Coefficient] = None,
        timing: Optional[Dict[str, Any]] = None,
    ) -> Dict[str, Any]:
        """
        Versioned JSON summary with every verdict and its witness constants.

        Args:
            results: Experiment results in execution order
            coefficient: The coefficient that was examined
            timing: PhaseTimer breakdown

        Returns:
            JSON-compatible dict
        """
        errors = [name for name, r in results.items() if r.status == ExperimentStatus.ERROR]
        summary: Dict[str, Any] = {
            'schema': SUMMARY_SCHEMA,
            'schema_version': CONFIG_SCHEMA_VERSION,
            'seed': self.config.seed,
            'coefficient': coefficient.describe() if coefficient is not None else None,
            'config': config_to_dict(self.config),
            'experiments': {
                name: {**result.to_dict(), 'artifact': f"{name}.csv" if result.executed else None}
                for name, result in results.items()
            },
            'verdicts': {name: result.status.value for name, result in results.items()},
            'errors': errors,
        }
        if timing is not None:
            summary['timing'] = timing
        return jsonable(summary)

    def write_summary(self, out_dir: Path, summary: Dict[str, Any]) -> Path:
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "summary.json"
        path.write_text(json.dumps(summary, indent=2, ensure_ascii=False) + "\n", encoding='utf-8')
        logger.info(f"💾 {path.name}: {len(summary.get('experiments', {}))} experiment(s)")
        return path

    # -- Excel ---------------------------------------------------------------

    def _sanitize_for_excel(self, df: pd.DataFrame) -> pd.DataFrame:
        """Strip control characters from string columns."""
        df = df.copy()
        for col in df.select_dtypes(include=['object']).columns:
            df[col] = df[col].apply(lambda v: ILLEGAL_EXCEL_CHARS.sub('', v) if isinstance(v, str) else v)
        return df

    def to_excel_bytes(self, results: Mapping[str, ExperimentResult]) -> bytes:
        """
        Workbook with a verdict sheet and one sheet per executed experiment.

        Returns:
            Excel file as bytes
        """
        output = BytesIO()
        with pd.ExcelWriter(output, engine='openpyxl') as writer:
            self._sanitize_for_excel(self.build_verdict_table(results)).to_excel(
                writer, sheet_name='summary', index=False)
            for name, result in results.items():
                if not result.executed:
                    continue
                df = self._sanitize_for_excel(self.build_dataframe(result))
                df.to_excel(writer, sheet_name=name[:31], index=False)
                logger.debug(f"sheet {name}: {len(df)} rows")
        return output.getvalue()

    def write_workbook(self, out_dir: Path, results: Mapping[str, ExperimentResult]) -> Path:
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "results.xlsx"
        path.write_bytes(self.to_excel_bytes(results))
        logger.info(f"💾 {path.name}")
        return path
