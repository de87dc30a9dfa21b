import logging
import logging.handlers
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

LOG_LEVEL_ENV = "ACTIVESELF_LOG_LEVEL"

# Loggers that get their own rotating file and do not propagate to root
DEDICATED_LOGGERS = ("pipeline", "netcore", "cli")


def resolve_log_level(log_level: Optional[str] = None) -> str:
    """
    Resolve the effective log level.

    An explicit argument wins; otherwise the ACTIVESELF_LOG_LEVEL environment
    variable (a .env file is honoured) is used, falling back to INFO.
    """
    if log_level:
        return log_level.upper()
    load_dotenv()
    return os.getenv(LOG_LEVEL_ENV, "INFO").upper()


def _rotating_handler(path: Path, level: int, formatter: logging.Formatter,
                      max_bytes: int = 10 * 1024 * 1024,
                      backup_count: int = 5) -> logging.Handler:
    handler = logging.handlers.RotatingFileHandler(
        path,
        maxBytes=max_bytes,
        backupCount=backup_count
    )
    handler.setLevel(level)
    handler.setFormatter(formatter)
    return handler


def setup_logging(log_level: Optional[str] = None, log_dir: Optional[str] = None) -> None:
    """
    Set up centralized logging configuration for the application.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL).
            Defaults to the ACTIVESELF_LOG_LEVEL environment variable.
        log_dir: Directory to store log files. Defaults to logs/ in project root.
    """
    if log_dir is None:
        base_dir = Path(__file__).parent.parent.resolve()
        log_dir = base_dir / "logs"

    log_dir = Path(log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)

    level_name = resolve_log_level(log_level)
    numeric_level = getattr(logging, level_name, logging.INFO)

    detailed_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s'
    )
    simple_formatter = logging.Formatter(
        '%(asctime)s - %(levelname)s - %(message)s'
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler()
    console_handler.setLevel(numeric_level)
    console_handler.setFormatter(simple_formatter)
    root_logger.addHandler(console_handler)

    root_logger.addHandler(
        _rotating_handler(log_dir / "app.log", numeric_level, detailed_formatter)
    )

    for name in DEDICATED_LOGGERS:
        dedicated = logging.getLogger(name)
        dedicated.handlers.clear()
        dedicated.addHandler(
            _rotating_handler(log_dir / f"{name}.log", numeric_level, detailed_formatter)
        )
        # Keep progress visible on the console as well
        dedicated.addHandler(console_handler)
        dedicated.setLevel(numeric_level)
        dedicated.propagate = False

    # Error log file for all ERROR and CRITICAL messages
    error_handler = _rotating_handler(
        log_dir / "error.log", logging.ERROR, detailed_formatter,
        max_bytes=5 * 1024 * 1024, backup_count=3
    )
    root_logger.addHandler(error_handler)
    for name in DEDICATED_LOGGERS:
        logging.getLogger(name).addHandler(error_handler)

    logger = logging.getLogger(__name__)
    logger.info(f"Logging configured successfully. Log directory: {log_dir}")
    logger.info(f"Log level: {level_name}")
    logger.info(f"Log files: app.log, {', '.join(n + '.log' for n in DEDICATED_LOGGERS)}, error.log")


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance with the specified name.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)


def get_pipeline_logger() -> logging.Logger:
    """Get the adaptation-pipeline logger."""
    return logging.getLogger('pipeline')


def get_netcore_logger() -> logging.Logger:
    """Get the network-engine logger."""
    return logging.getLogger('netcore')


def get_cli_logger() -> logging.Logger:
    """Get the command-line logger."""
    return logging.getLogger('cli')
