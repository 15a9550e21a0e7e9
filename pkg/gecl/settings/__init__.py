"""
Environment settings module for the GECL lab.

Exports:
- Settings: Pydantic settings class for GECL_* environment variables
- get_settings: Cached settings getter
- Environment: Deployment environment enum
"""

from .settings import Environment, Settings, get_settings

__all__ = ["Settings", "get_settings", "Environment"]
