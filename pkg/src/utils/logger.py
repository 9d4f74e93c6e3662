"""
Logging configuration for the coded caching toolkit
"""

import os
import sys

from loguru import logger

from config import SETTINGS

_LOG_SETTINGS = SETTINGS.get('logging', {})
LOG_LEVEL = os.environ.get('CODED_CACHING_LOG_LEVEL', _LOG_SETTINGS.get('level', 'INFO'))

# Remove default handler
logger.remove()

# Add custom handler with formatting
logger.add(
    sys.stderr,
    format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | <level>{message}</level>",
    level=LOG_LEVEL
)

_file_sinks = {}


def add_file_sink(path: str = None):
    """Attach the rotating file handler (called by the CLI, not on import). One sink per path."""
    path = path or _LOG_SETTINGS.get('file')
    if not path:
        return None
    if path not in _file_sinks:
        _file_sinks[path] = logger.add(
            path,
            rotation=_LOG_SETTINGS.get('rotation', '10 MB'),
            retention=_LOG_SETTINGS.get('retention', '7 days'),
            format=_LOG_SETTINGS.get('format', "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} | {message}"),
            level="DEBUG"
        )
    return _file_sinks[path]


__all__ = ['logger', 'add_file_sink']
