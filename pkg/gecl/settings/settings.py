# gecl/settings/settings.py
"""
Environment-driven settings for the GECL lab.

Uses pydantic-settings so that runtime knobs (log level, worker count,
output directory, seed) can be set through ``GECL_*`` environment
variables or a ``.env`` file. Experiment parameters live in
``gecl.config`` instead.
"""

from enum import Enum
from functools import lru_cache
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Environment(str, Enum):
    """Deployment environment."""
    DEVELOPMENT = "development"
    TEST = "test"
    PRODUCTION = "production"


class Settings(BaseSettings):
    """
    Runtime settings loaded from environment variables.

    Variable names are the upper-case field names with a ``GECL_`` prefix,
    e.g. ``GECL_THREADS=4``.
    """

    model_config = SettingsConfigDict(
        env_prefix="GECL_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # === Application ===
    app_name: str = "gecl-lab"
    environment: Environment = Environment.DEVELOPMENT
    debug: bool = False

    # === Logging ===
    log_level: str = "INFO"
    log_file: Optional[str] = None

    # === Execution ===
    threads: int = Field(default=1, ge=1)
    output_dir: str = "results"
    seed: int = 20240101

    @property
    def is_production(self) -> bool:
        """Check if running in production environment."""
        return self.environment == Environment.PRODUCTION

    @property
    def is_test(self) -> bool:
        """Check if running under the test suite."""
        return self.environment == Environment.TEST


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance.

    Returns:
        Settings instance with values from environment
    """
    return Settings()
