"""
Logging utilities for the DPS workbench
Provides consistent logging across all modules
"""

import logging
import sys
from pathlib import Path
from typing import Optional, Union

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

# Top-level packages whose loggers follow the CLI verbosity
PACKAGE_LOGGERS = ('src', 'pipelines', 'scripts')


def _resolve_level(level: Union[int, str]) -> int:
    if isinstance(level, int):
        return level
    resolved = logging.getLevelName(str(level).upper())
    if not isinstance(resolved, int):
        raise ValueError(f"Unknown log level: {level}")
    return resolved


def setup_logger(
    name: str,
    log_file: Optional[Path] = None,
    level: Union[int, str] = logging.INFO
) -> logging.Logger:
    """
    Setup a logger with console and optional file handlers

    Args:
        name: Logger name
        log_file: Optional path to log file
        level: Logging level (int or name such as "DEBUG")

    Returns:
        Configured logger instance
    """
    level = _resolve_level(level)
    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Avoid adding handlers multiple times
    if logger.hasHandlers():
        logger.handlers.clear()

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def configure_logging(
    level: Union[int, str] = logging.INFO,
    log_file: Optional[Path] = None
) -> None:
    """
    Configure every package logger of the workbench at once

    Module loggers obtained through get_logger() are children of these
    package loggers, so a single call controls the whole code base.

    Args:
        level: Logging level
        log_file: Optional path to log file shared by all packages
    """
    for package in PACKAGE_LOGGERS:
        setup_logger(package, log_file=log_file, level=level)


def get_logger(name: str) -> logging.Logger:
    """
    Get an existing logger or create a new one

    Args:
        name: Logger name

    Returns:
        Logger instance
    """
    return logging.getLogger(name)
