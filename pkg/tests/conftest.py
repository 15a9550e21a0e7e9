"""
Pytest configuration and fixtures for the GECL lab.
"""

import os
from dataclasses import replace

import pytest

# Set test environment before importing the package
os.environ["GECL_ENVIRONMENT"] = "test"
os.environ.setdefault("GECL_LOG_LEVEL", "WARNING")

from gecl.config import (  # noqa: E402
    AppConfig,
    CoefficientConfig,
    EnergyConfig,
    Family,
    GridConfig,
    PerturbationKind,
    PropagatorConfig,
)
from gecl.services.coefficient_service import CoefficientService  # noqa: E402


def small_config(**coefficient) -> AppConfig:
    """Default config with short horizons so unit tests stay fast."""
    return AppConfig(
        coefficient=CoefficientConfig(**coefficient),
        grid=GridConfig(t_max=100.0, points_per_decade=16, packet_points=16),
        propagator=PropagatorConfig(xi_count=4, t_max=100.0, points_per_decade=8),
        energy=EnergyConfig(t_max=20.0, points_per_decade=8, quad_points=24),
    )


@pytest.fixture
def config():
    """Polynomial p=2, q=1, r=1/2, m=2 with ω ≡ 1."""
    return small_config(family=Family.POLYNOMIAL, p=2.0, q=1.0, r=0.5, m=2)


@pytest.fixture
def constant_config():
    """Free-wave control a ≡ 1."""
    return small_config(family=Family.CONSTANT)


@pytest.fixture
def suprapolynomial_config():
    """exp(√t) with β = 1/2, m = 2."""
    return small_config(family=Family.SUPRAPOLYNOMIAL, alpha=0.5, beta=0.5, m=2)


@pytest.fixture
def admissible_config(config):
    coefficient = replace(config.coefficient, perturbation=PerturbationKind.ADMISSIBLE, j_max=6)
    return replace(config, coefficient=coefficient)


@pytest.fixture
def counterexample_config(config):
    coefficient = replace(config.coefficient, perturbation=PerturbationKind.COUNTEREXAMPLE,
                          epsilon=0.5, sigma=2.0, j_max=6)
    return replace(config, coefficient=coefficient)


@pytest.fixture
def polynomial_coef(config):
    return CoefficientService(config).build()


@pytest.fixture
def constant_coef(constant_config):
    return CoefficientService(constant_config).build()


@pytest.fixture
def suprapolynomial_coef(suprapolynomial_config):
    return CoefficientService(suprapolynomial_config).build()


@pytest.fixture
def admissible_coef(admissible_config):
    return CoefficientService(admissible_config).build()


@pytest.fixture
def counterexample_coef(counterexample_config):
    return CoefficientService(counterexample_config).build()
