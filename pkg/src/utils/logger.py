"""
Logging setup shared by the toolkit.

Handlers write to stderr; stdout belongs to the JSON reports of the
command-line front end. ``QFOCK_LOG_LEVEL`` and ``QFOCK_LOG_FORMAT`` are
read when a logger is first configured.
"""

import logging
import os
import sys
from typing import Optional

DEFAULT_LEVEL = logging.WARNING
DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _env_level() -> int:
    name = os.environ.get("QFOCK_LOG_LEVEL", "").strip().upper()
    level = logging.getLevelName(name) if name else DEFAULT_LEVEL
    return level if isinstance(level, int) else DEFAULT_LEVEL


def setup_logger(name: str, level: Optional[int] = None) -> logging.Logger:
    """
    Logger with one stderr handler.

    Args:
        name: logger name, usually ``__name__``
        level: overrides ``QFOCK_LOG_LEVEL``

    Returns:
        the configured logger; repeated calls reuse its handler
    """
    log_level = _env_level() if level is None else level
    logger = logging.getLogger(name)
    logger.setLevel(log_level)

    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(log_level)
        handler.setFormatter(logging.Formatter(os.environ.get("QFOCK_LOG_FORMAT", DEFAULT_FORMAT)))
        logger.addHandler(handler)
        logger.propagate = False

    return logger
