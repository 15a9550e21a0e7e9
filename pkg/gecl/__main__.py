# gecl/__main__.py
"""Entry point for ``python -m gecl``."""
import sys

from .cli import main

sys.exit(main())
