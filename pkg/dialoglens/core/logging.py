"""
Logging setup for the `dialoglens` logger tree
"""
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional

from dialoglens.core.config import Settings, get_settings

LOGGER_NAME = "dialoglens"


def setup_logging(current: Optional[Settings] = None, level: Optional[str] = None) -> logging.Logger:
    """
    Configure the package logger.
    Always logs to stderr; also to a rotating file when LOG_FILE is set.
    Stdout is left to command output.
    """
    current = current or get_settings()
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel((level or current.LOG_LEVEL).upper())

    # Remove existing handlers to avoid duplicates
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(
        '%(asctime)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(formatter)
    logger.addHandler(stream_handler)

    if current.LOG_FILE:
        log_dir = os.path.dirname(current.LOG_FILE)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        file_handler = RotatingFileHandler(
            current.LOG_FILE,
            maxBytes=current.LOG_MAX_SIZE,
            backupCount=current.LOG_BACKUP_COUNT,
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger
