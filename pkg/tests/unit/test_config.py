"""
Unit tests for the JSON configuration layer and the environment settings.
"""

import json
import math
from pathlib import Path

import pytest

from gecl.config import (
    EXPERIMENT_NAMES,
    AppConfig,
    ConfigError,
    Family,
    PerturbationKind,
    config_from_dict,
    config_to_dict,
    load_config,
)
from gecl.services.coefficient_service import CoefficientService
from gecl.settings import Environment, Settings


class TestConfigFromDict:
    """Tests for strict parsing."""

    def test_defaults_round_trip(self):
        config = AppConfig()
        assert config_from_dict(config_to_dict(config)) == config

    def test_nested_sections(self):
        config = config_from_dict({
            'coefficient': {'family': 'exponential', 'a': 0.25, 'perturbation': 'counterexample'},
            'propagator': {'tasks': [{'s': 0, 't': 5, 'xi': 2}]},
            'experiments': ['validate', 'energy'],
        })
        assert config.coefficient.family == Family.EXPONENTIAL
        assert config.coefficient.perturbation == PerturbationKind.COUNTEREXAMPLE
        assert config.coefficient.a == 0.25
        assert config.propagator.tasks[0].t == 5.0
        assert isinstance(config.propagator.tasks[0].t, float)

    @pytest.mark.parametrize("data, message", [
        ({'colour': 'red'}, "unknown key"),
        ({'coefficient': {'pp': 2}}, "coefficient.pp"),
        ({'coefficient': {'family': 'cubic'}}, "not one of"),
        ({'coefficient': {'m': 1.5}}, "expected an integer"),
        ({'coefficient': {'p': 'two'}}, "expected a number"),
        ({'output': {'xlsx': 'yes'}}, "true/false"),
        ({'experiments': 'validate'}, "expected a list"),
        ({'experiments': ['validate', 'plot']}, "unknown experiment"),
        ({'threads': 0}, "threads"),
    ])
    def test_rejects_malformed_documents(self, data, message):
        with pytest.raises(ConfigError, match=message):
            config_from_dict(data)

    def test_integral_floats_are_accepted_as_integers(self):
        assert config_from_dict({'coefficient': {'m': 3.0}}).coefficient.m == 3


class TestExperimentList:
    """Tests for the experiment selection."""

    def test_all_expands_in_canonical_order(self):
        config = AppConfig(experiments=['all'])
        assert config.experiment_list() == list(EXPERIMENT_NAMES)

    def test_duplicates_are_dropped(self):
        config = AppConfig(experiments=['energy', 'validate', 'energy'])
        assert config.experiment_list() == ['energy', 'validate']


class TestLoadConfig:
    """Tests for reading config files."""

    def test_missing_path_gives_defaults(self):
        assert load_config(None) == AppConfig()

    def test_reads_file(self, tmp_path):
        path = tmp_path / 'run.json'
        path.write_text(json.dumps({'seed': 7, 'coefficient': {'family': 'constant'}}), encoding='utf-8')
        config = load_config(path)
        assert config.seed == 7
        assert config.coefficient.family == Family.CONSTANT

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / 'missing.json')

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"seed": ', encoding='utf-8')
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(path)

    def test_top_level_must_be_object(self, tmp_path):
        path = tmp_path / 'list.json'
        path.write_text('[1, 2]', encoding='utf-8')
        with pytest.raises(ConfigError, match="object"):
            load_config(path)


class TestSettings:
    """Tests for GECL_* environment settings."""

    def test_environment_variables(self, monkeypatch):
        monkeypatch.setenv('GECL_THREADS', '3')
        monkeypatch.setenv('GECL_ENVIRONMENT', 'production')
        settings = Settings()
        assert settings.threads == 3
        assert settings.is_production
        assert 'threads' in settings.model_fields_set

    def test_test_environment(self):
        settings = Settings()
        assert settings.environment == Environment.TEST
        assert settings.is_test


class TestShippedConfigs:
    """Every example document under configs/ must load."""

    @pytest.mark.parametrize("path", sorted((Path(__file__).parents[2] / 'configs').glob('*.json')),
                             ids=lambda p: p.stem)
    def test_loads(self, path):
        config = load_config(path)
        assert config.experiment_list()

    @pytest.mark.parametrize("path", sorted((Path(__file__).parents[2] / 'configs').glob('*.json')),
                             ids=lambda p: p.stem)
    def test_energy_horizon_is_desk_scale(self, path):
        # Λ(T)·ρ_hi is the phase every quadrature node accumulates
        config = load_config(path)
        if 'energy' not in config.experiment_list():
            pytest.skip("no energy experiment")
        coef = CoefficientService(config).build()
        T = coef.shape.safe_horizon(config.energy.t_max)
        phase = float(coef.shape.log_primitive(T)) + math.log(config.energy.rho_hi)
        assert phase <= math.log(1.0e5)

    @pytest.mark.parametrize("name, family", [
        ('admissible', Family.POLYNOMIAL),
        ('admissible_suprapolynomial', Family.SUPRAPOLYNOMIAL),
        ('admissible_exponential', Family.EXPONENTIAL),
    ])
    def test_admissible_configs_cover_every_family(self, name, family):
        config = load_config(Path(__file__).parents[2] / 'configs' / f'{name}.json')
        assert config.coefficient.family == family
        assert config.coefficient.perturbation == PerturbationKind.ADMISSIBLE
        assert 'energy' in config.experiment_list()
        assert CoefficientService(config).build().has_perturbation
