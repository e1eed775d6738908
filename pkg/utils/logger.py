import logging
import os
from logging.handlers import RotatingFileHandler
from typing import Optional

from config import settings


class Logger:
    """
    Centralized logging class for simulation runs.
    Supports console output and rotating file logging.
    """

    LOG_FILE = settings.LOG_FILE
    LOG_DIR = settings.LOG_DIR
    MAX_LOG_FILE_SIZE = 10 * 1024 * 1024  # 10 MB
    BACKUP_COUNT = 7
    LOG_LEVEL = settings.LOGGING_LEVEL

    @staticmethod
    def get_logger(name: Optional[str] = None) -> logging.Logger:
        """
        Configures and returns a logger instance.

        Args:
            name (Optional[str]): Name of the logger. Defaults to None (root logger).

        Returns:
            logging.Logger: Configured logger instance.
        """
        logger = logging.getLogger(name)
        logger.setLevel(logging.DEBUG)

        # Avoid adding duplicate handlers
        if logger.handlers:
            return logger

        Logger.ensure_log_dir()

        log_file_path = os.path.join(Logger.LOG_DIR, Logger.LOG_FILE)
        file_handler = RotatingFileHandler(
            log_file_path, maxBytes=Logger.MAX_LOG_FILE_SIZE, backupCount=Logger.BACKUP_COUNT
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(
            logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        )

        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.getLevelName(Logger.LOG_LEVEL))
        console_handler.setFormatter(logging.Formatter("%(levelname)s - %(message)s"))

        logger.addHandler(file_handler)
        logger.addHandler(console_handler)
        logger.propagate = False
        return logger

    @staticmethod
    def ensure_log_dir() -> str:
        """Create the log directory if it is missing and return its path."""
        if not os.path.exists(Logger.LOG_DIR):
            os.makedirs(Logger.LOG_DIR, exist_ok=True)
        return Logger.LOG_DIR

    @staticmethod
    def set_console_level(level: str):
        """
        Changes the console verbosity of every logger configured through this class.

        Args:
            level (str): A logging level name such as "DEBUG" or "WARNING".
        """
        numeric = logging.getLevelName(level.upper())
        if not isinstance(numeric, int):
            raise ValueError(f"Unknown log level: {level}")
        Logger.LOG_LEVEL = level.upper()
        for existing in [logging.getLogger(), *logging.Logger.manager.loggerDict.values()]:
            if not isinstance(existing, logging.Logger):
                continue
            for handler in existing.handlers:
                if isinstance(handler, logging.StreamHandler) and not isinstance(
                    handler, RotatingFileHandler
                ):
                    handler.setLevel(numeric)
