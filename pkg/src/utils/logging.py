"""
Logging for the scene grammar parser.

Every module logs through ``get_logger("<area>.<module>")``; the CLI calls
``setup_logging`` once per invocation to attach a file and a console handler to
the package logger.
"""
import logging
from pathlib import Path
from typing import Optional

from src.utils.config import settings

ROOT_LOGGER = "scenegrammar"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(log_level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    """
    Configure the package logger.

    Handlers from an earlier call are closed and replaced, so running the CLI twice
    in one process logs to the second run's file.

    Args:
        log_level: Level name (DEBUG, INFO, WARNING, ERROR); defaults to settings
        log_file: Log file path; defaults to settings

    Returns:
        The package logger
    """
    level_name = (log_level or settings.log_level).upper()
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        raise ValueError(f"unknown log level: {level_name}")
    file_path = Path(log_file or settings.log_file)
    file_path.parent.mkdir(parents=True, exist_ok=True)

    logger = logging.getLogger(ROOT_LOGGER)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT)
    for handler in (logging.FileHandler(file_path, encoding="utf-8"), logging.StreamHandler()):
        handler.setFormatter(formatter)
        logger.addHandler(handler)
    logger.setLevel(level)

    logger.info(f"Logging initialized. Level: {level_name}, File: {file_path}")
    return logger


def get_logger(name: str) -> logging.Logger:
    """Module logger under the package namespace."""
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")
