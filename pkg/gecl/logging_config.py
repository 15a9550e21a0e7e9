# gecl/logging_config.py
"""
Logging configuration for the GECL lab.

Developer Mode:
    Set environment variable: GECL_DEV_MODE=1
    This enables:
    - DEBUG level logging (integrator statistics, per-packet diagnostics)
    - Wider logger-name column in the console format
"""
import logging
import os
import sys
from typing import Optional, Union


class LogColors:
    """ANSI color codes for colored logging."""
    RESET = "\033[0m"

    DEBUG = "\033[36m"      # Cyan
    INFO = "\033[32m"       # Green
    WARNING = "\033[33m"    # Yellow
    ERROR = "\033[31m"      # Red
    CRITICAL = "\033[35m"   # Magenta

    PHASE = "\033[1;34m"    # Bold Blue
    PASS = "\033[1;32m"     # Bold Green
    FAIL = "\033[1;31m"     # Bold Red
    MARGINAL = "\033[1;33m"  # Bold Yellow
    TIMING = "\033[35m"     # Magenta


class ColoredFormatter(logging.Formatter):
    """
    Formatter that colours level names and verdict/timing markers.

    Colours are only emitted when stdout is a TTY.
    """

    LEVEL_COLORS = {
        logging.DEBUG: LogColors.DEBUG,
        logging.INFO: LogColors.INFO,
        logging.WARNING: LogColors.WARNING,
        logging.ERROR: LogColors.ERROR,
        logging.CRITICAL: LogColors.CRITICAL,
    }

    # Checked in order; first match wins.
    MARKERS = (
        (("⏱️", "CHECKPOINT", "FINISH"), LogColors.TIMING),
        (("✅", "PASS"), LogColors.PASS),
        (("❌", "FAIL"), LogColors.FAIL),
        (("⚠️", "MARGINAL"), LogColors.MARGINAL),
        (("🚀", "BEGIN", "EXPERIMENT"), LogColors.PHASE),
    )

    def __init__(self, *args, use_colors: bool = True, **kwargs):
        super().__init__(*args, **kwargs)
        self.use_colors = use_colors and sys.stdout.isatty()

    def format(self, record: logging.LogRecord) -> str:
        if not self.use_colors:
            return super().format(record)

        record = logging.makeLogRecord(record.__dict__)
        color = self.LEVEL_COLORS.get(record.levelno)
        if color:
            record.levelname = f"{color}{record.levelname}{LogColors.RESET}"

        message = record.getMessage()
        for tokens, marker_color in self.MARKERS:
            if any(token in message for token in tokens):
                message = f"{marker_color}{message}{LogColors.RESET}"
                break

        record.msg = message
        record.args = ()
        return super().format(record)


def is_dev_mode() -> bool:
    """
    Check if developer mode is enabled.

    Returns:
        True if GECL_DEV_MODE is set to 1, yes, true or on
    """
    return os.getenv('GECL_DEV_MODE', '').lower() in ('1', 'yes', 'true', 'on')


def _resolve_level(level: Union[int, str, None]) -> int:
    if level is None:
        return logging.INFO
    if isinstance(level, str):
        resolved = logging.getLevelName(level.upper())
        return resolved if isinstance(resolved, int) else logging.INFO
    return level


def setup_logging(
    level: Union[int, str, None] = None,
    log_file: Optional[str] = None,
    format_string: Optional[str] = None,
    use_colors: bool = True
) -> logging.Logger:
    """
    Configure the ``gecl`` logger hierarchy.

    Args:
        level: Logging level as int or name (default: INFO, DEBUG in dev mode)
        log_file: Optional file path for an uncoloured copy of the log
        format_string: Custom format string for log messages
        use_colors: Whether to colour console output (default: True)

    Returns:
        Configured package logger
    """
    dev_mode = is_dev_mode()
    level = logging.DEBUG if dev_mode else _resolve_level(level)

    if format_string is None:
        if dev_mode:
            format_string = '[%(asctime)s] %(levelname)-8s | %(name)-28s | %(message)s'
        else:
            format_string = '[%(asctime)s] %(levelname)s - %(name)s - %(message)s'

    logger = logging.getLogger('gecl')
    logger.setLevel(level)
    logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(level)
    if use_colors:
        console_handler.setFormatter(ColoredFormatter(format_string, datefmt='%H:%M:%S'))
    else:
        console_handler.setFormatter(logging.Formatter(format_string, datefmt='%Y-%m-%d %H:%M:%S'))
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter(
            '[%(asctime)s] %(levelname)s - %(name)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        logger.addHandler(file_handler)

    if dev_mode:
        logger.info("🔧 DEVELOPER MODE ENABLED - Verbose logging active")

    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger below the ``gecl`` hierarchy.

    Args:
        name: Short component name, e.g. ``'integrator'``

    Returns:
        Logger instance
    """
    return logging.getLogger(f'gecl.{name}')


def log_section(logger: logging.Logger, title: str, width: int = 80) -> None:
    """Log a boxed section header."""
    separator = "=" * width
    logger.info(separator)
    logger.info(f"  {title}")
    logger.info(separator)
