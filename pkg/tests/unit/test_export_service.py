"""
Unit tests for ExportService (CSV, JSON summary, Excel workbook).
"""

import json
from io import BytesIO

import pandas as pd
import pytest

from gecl.domain.experiment import ExperimentResult, ExperimentStatus
from gecl.domain.reports import CheckReport, Verdict
from gecl.services.export_service import SUMMARY_SCHEMA, ExportService


@pytest.fixture
def exporter(config):
    return ExportService(config)


@pytest.fixture
def results():
    validate = ExperimentResult.from_reports('validate', [
        CheckReport(name='A1', status=Verdict.PASS, metrics={'ratio_sup': 2.0},
                    rows=[{'t': 0.1, 'ratio': 2.5}, {'t': 1.0, 'ratio': 1.0 / 3.0}]),
        CheckReport(name='A3', status=Verdict.MARGINAL, notes=['tail\x07 drop 0.7']),
    ])
    floquet = ExperimentResult.skipped('counterexample', 'needs a counterexample perturbation')
    return {'validate': validate, 'counterexample': floquet}


class TestCsv:
    """Tests for the per-experiment CSV artifacts."""

    def test_rows_are_tagged_with_their_check(self, exporter, results):
        df = exporter.build_dataframe(results['validate'])
        assert list(df.columns) == ['check', 't', 'ratio']
        assert list(df['check']) == ['A1', 'A1']

    def test_full_precision_floats(self, exporter, results):
        body = exporter.to_csv_bytes(exporter.build_dataframe(results['validate'])).decode('utf-8')
        assert body.splitlines() == [
            'check,t,ratio',
            'A1,0.10000000000000001,2.5',
            'A1,1,0.33333333333333331',
        ]
        assert '\r' not in body

    def test_empty_result_keeps_header(self, exporter, results):
        body = exporter.to_csv_bytes(exporter.build_dataframe(results['counterexample']))
        assert body == b'check\n'

    def test_write_experiment(self, exporter, results, tmp_path):
        path = exporter.write_experiment(tmp_path / 'out', results['validate'])
        assert path.name == 'validate.csv'
        assert path.read_bytes().startswith(b'check,t,ratio\n')


class TestSummary:
    """Tests for summary.json."""

    def test_schema_and_verdicts(self, exporter, results, polynomial_coef):
        summary = exporter.build_summary(results, polynomial_coef, timing={'total_s': 1.5})
        assert summary['schema'] == SUMMARY_SCHEMA
        assert summary['verdicts'] == {'validate': 'marginal', 'counterexample': 'skipped'}
        assert summary['experiments']['validate']['artifact'] == 'validate.csv'
        assert summary['experiments']['counterexample']['artifact'] is None
        assert summary['experiments']['counterexample']['message'].startswith('needs')
        assert summary['errors'] == []
        assert summary['coefficient'] == polynomial_coef.describe()
        assert summary['config']['coefficient']['family'] == 'polynomial'
        assert summary['timing'] == {'total_s': 1.5}

    def test_errors_are_listed(self, exporter):
        failed = {'energy': ExperimentResult.error('energy', RuntimeError('boom'))}
        summary = exporter.build_summary(failed)
        assert summary['errors'] == ['energy']
        assert summary['experiments']['energy']['message'] == 'RuntimeError: boom'

    def test_written_summary_is_valid_json(self, exporter, results, tmp_path):
        path = exporter.write_summary(tmp_path, exporter.build_summary(results))
        assert json.loads(path.read_text(encoding='utf-8'))['schema'] == SUMMARY_SCHEMA


class TestExcel:
    """Tests for the optional workbook."""

    def test_verdict_table(self, exporter, results):
        table = exporter.build_verdict_table(results)
        assert list(table['status']) == ['pass', 'marginal', 'skipped']
        assert list(table['experiment']) == ['validate', 'validate', 'counterexample']

    def test_workbook_sheets(self, exporter, results):
        data = exporter.to_excel_bytes(results)
        assert data[:2] == b'PK'
        sheets = pd.read_excel(BytesIO(data), sheet_name=None, engine='openpyxl')
        assert list(sheets) == ['summary', 'validate']
        assert 'tail drop 0.7' in list(sheets['summary']['message'].fillna(''))
        assert results['validate'].status == ExperimentStatus.MARGINAL
