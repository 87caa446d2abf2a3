"""
Logging Setup
=============
Handlers hang off the root logger and are installed once per process by the
command line. Library modules only ask for get_logger(__name__).

Console verbosity follows -v / -q. A --log-file always keeps at least INFO,
so a quiet campaign still leaves a full progress record on disk.
"""

import logging
import sys
from pathlib import Path
from typing import List, Optional

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Libraries that flood DEBUG output with their own internals
NOISY_LOGGERS = ("matplotlib", "PIL")

# Per process; campaign workers start unconfigured
_logging_configured = False


def level_from_verbosity(verbose: bool, quiet: bool = False) -> int:
    """Map the CLI --verbose / --quiet flags to a logging level."""
    if quiet:
        return logging.WARNING
    return logging.DEBUG if verbose else logging.INFO


def file_level(console_level: int) -> int:
    """Level for the log file: the console level, but never above INFO."""
    return min(console_level, logging.INFO)


def build_handlers(
    console_level: int,
    log_file: Optional[str] = None,
    format_string: Optional[str] = None,
) -> List[logging.Handler]:
    """
    Create the stdout handler and, when asked, a file handler.

    Args:
        console_level: Level of the stdout handler
        log_file: Optional log file; parent directories are created
        format_string: Optional custom format string

    Returns:
        Handlers sharing one formatter
    """
    formatter = logging.Formatter(format_string or DEFAULT_FORMAT)

    console = logging.StreamHandler(sys.stdout)
    console.setLevel(console_level)
    handlers: List[logging.Handler] = [console]

    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        record = logging.FileHandler(path, encoding="utf-8")
        record.setLevel(file_level(console_level))
        handlers.append(record)

    for handler in handlers:
        handler.setFormatter(formatter)
    return handlers


def setup_logging(
    level: int = logging.INFO,
    log_file: Optional[str] = None,
    format_string: Optional[str] = None,
) -> logging.Logger:
    """
    Install the handlers on the root logger; later calls are no-ops.

    Args:
        level: Console level (default: INFO)
        log_file: Optional path to a log file
        format_string: Optional custom format string

    Returns:
        Root logger instance
    """
    global _logging_configured

    root = logging.getLogger()
    if _logging_configured:
        return root

    handlers = build_handlers(level, log_file, format_string)
    logging.basicConfig(
        level=min(h.level for h in handlers),
        handlers=handlers,
        force=True,
    )

    # numpy RuntimeWarnings from the samplers end up in the same stream
    logging.captureWarnings(True)
    for name in NOISY_LOGGERS:
        logging.getLogger(name).setLevel(max(level, logging.WARNING))

    _logging_configured = True
    return root


def configure_cli_logging(
    verbose: bool = False,
    quiet: bool = False,
    log_file: Optional[str] = None,
) -> logging.Logger:
    """Set up logging from the command-line verbosity flags."""
    return setup_logging(level=level_from_verbosity(verbose, quiet), log_file=log_file)


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


def reset_logging():
    """Drop the installed handlers so the next setup starts clean."""
    global _logging_configured
    _logging_configured = False
    logging.captureWarnings(False)
    root = logging.getLogger()
    root.setLevel(logging.WARNING)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        if isinstance(handler, logging.FileHandler):
            handler.close()
    for name in NOISY_LOGGERS:
        logging.getLogger(name).setLevel(logging.NOTSET)
