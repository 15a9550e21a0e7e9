# GECL lab: generalised energy conservation law for wave equations
# with time-dependent propagation speed a(t) = λ(t)ω(t)

__version__ = "1.0.0"

from .config import AppConfig, ConfigError, load_config

__all__ = ['__version__', 'AppConfig', 'ConfigError', 'load_config']
