"""Logging configuration for ghelab."""

import logging
import sys
from pathlib import Path
from typing import List, Optional

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# epsilon runs log from pool threads
THREADED_FORMAT = "%(asctime)s - %(threadName)s - %(name)s - %(levelname)s - %(message)s"

QUIET_LOGGERS = ("matplotlib", "numba", "PIL")

logger = logging.getLogger(__name__)


def setup_logging(
    level: str = "INFO",
    log_file: Optional[Path] = None,
    format_string: Optional[str] = None,
    threads: int = 1,
) -> None:
    """Route laboratory logging to stdout and optionally to a file.

    Reports are produced by the output writers alone, so nothing set here
    changes a report file.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR)
        log_file: Optional file receiving a copy of every record
        format_string: Record format; by default the thread name is added
            when more than one worker thread runs
        threads: Worker threads of the run
    """
    if format_string is None:
        format_string = THREADED_FORMAT if threads > 1 else DEFAULT_FORMAT

    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        numeric_level = logging.INFO

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stdout)]
    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(path))

    root = logging.getLogger()
    root.setLevel(numeric_level)
    for handler in root.handlers[:]:
        root.removeHandler(handler)

    formatter = logging.Formatter(format_string)
    for handler in handlers:
        handler.setLevel(numeric_level)
        handler.setFormatter(formatter)
        root.addHandler(handler)

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)

    # numpy RuntimeWarnings (overflow, invalid values) end up in the log
    logging.captureWarnings(True)

    logger.debug(f"Logging configured: level={level}, threads={threads}")
    if log_file:
        logger.info(f"Log file: {log_file}")
