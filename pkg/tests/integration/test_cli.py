"""
Integration tests for the batch runner (argument handling, exit codes and artifacts).
"""

import json

import pytest

from gecl.cli import EXIT_CONFIG, EXIT_ERROR, EXIT_OK, apply_overrides, build_parser, main
from gecl.config import AppConfig, ConfigError, config_from_dict
from gecl.settings import Settings

SMALL = {
    'grid': {'t_max': 100.0, 'points_per_decade': 16, 'packet_points': 16},
    'propagator': {'xi_count': 4, 't_max': 100.0, 'points_per_decade': 8},
}


def write_config(tmp_path, **sections):
    path = tmp_path / 'config.json'
    path.write_text(json.dumps({**SMALL, **sections}), encoding='utf-8')
    return path


def read_summary(out_dir):
    return json.loads((out_dir / 'summary.json').read_text(encoding='utf-8'))


class TestMain:
    """End-to-end runs through ``main``."""

    def test_no_experiments_writes_only_summary(self, tmp_path):
        out = tmp_path / 'out'
        code = main(['--config', str(write_config(tmp_path)), '--out', str(out)])
        assert code == EXIT_OK
        assert sorted(p.name for p in out.iterdir()) == ['summary.json']
        summary = read_summary(out)
        assert summary['experiments'] == {}
        assert summary['coefficient'].startswith('a(t) = (1+t)^2')

    def test_validate_writes_csv(self, tmp_path):
        out = tmp_path / 'out'
        code = main(['--config', str(write_config(tmp_path)), '--out', str(out), '--experiment', 'validate'])
        assert code == EXIT_OK
        assert (out / 'validate.csv').read_text(encoding='utf-8').startswith('check,')
        summary = read_summary(out)
        assert summary['verdicts']['validate'] in ('pass', 'marginal', 'fail')
        assert 'A1' in summary['experiments']['validate']['checks']

    def test_unknown_key_is_a_config_error(self, tmp_path):
        path = write_config(tmp_path, colour='red')
        assert main(['--config', str(path), '--out', str(tmp_path / 'out')]) == EXIT_CONFIG

    def test_missing_config_file(self, tmp_path):
        assert main(['--config', str(tmp_path / 'nope.json')]) == EXIT_CONFIG

    def test_counterexample_without_counterexample_coefficient_is_skipped(self, tmp_path):
        out = tmp_path / 'out'
        code = main(['--config', str(write_config(tmp_path)), '--out', str(out),
                     '--experiment', 'counterexample'])
        assert code == EXIT_OK
        summary = read_summary(out)
        assert summary['verdicts'] == {'counterexample': 'skipped'}
        assert not (out / 'counterexample.csv').exists()

    def test_inadmissible_coefficient_is_an_error(self, tmp_path):
        out = tmp_path / 'out'
        path = write_config(tmp_path, coefficient={'p': 2.0, 'q': 3.0}, experiments=['validate'])
        assert main(['--config', str(path), '--out', str(out)]) == EXIT_ERROR
        summary = read_summary(out)
        assert summary['errors'] == ['validate']
        assert 'q < p' in summary['experiments']['validate']['message']

    def test_rejects_unknown_experiment_flag(self):
        with pytest.raises(SystemExit):
            main(['--experiment', 'plot'])


class TestOverrides:
    """Tests for flag > environment > document precedence."""

    def test_environment_overrides_document(self, monkeypatch):
        monkeypatch.setenv('GECL_SEED', '9')
        config = config_from_dict({'seed': 5, 'threads': 2})
        merged = apply_overrides(config, build_parser().parse_args([]), Settings())
        assert merged.seed == 9
        assert merged.threads == 2

    def test_flags_override_environment(self, monkeypatch, tmp_path):
        monkeypatch.setenv('GECL_SEED', '9')
        args = build_parser().parse_args(['--seed', '11', '--out', str(tmp_path), '--xlsx',
                                          '--experiment', 'zones', '--experiment', 'energy'])
        merged = apply_overrides(AppConfig(seed=5), args, Settings())
        assert merged.seed == 11
        assert merged.output.directory == str(tmp_path)
        assert merged.output.xlsx
        assert merged.experiments == ['zones', 'energy']

    def test_bad_thread_flag(self):
        args = build_parser().parse_args(['--threads', '0'])
        with pytest.raises(ConfigError):
            apply_overrides(AppConfig(), args, Settings())
