"""Root logger setup: a rotating DEBUG file plus a stderr stream whose level the CLI controls."""

from __future__ import annotations

import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional, Union

from utils.paths import LOG_DIR

FORMAT = "%(asctime)s | %(levelname)s | %(name)s | pid=%(process)d tid=%(threadName)s | %(message)s"
LOG_FILE = LOG_DIR / "tstoolkit.log"
MAX_BYTES = 2 * 1024 * 1024
BACKUPS = 5

_console: Optional[logging.Handler] = None


def _attach(handler: logging.Handler, level: int) -> logging.Handler:
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(FORMAT))
    logging.getLogger().addHandler(handler)
    return handler


def get_logger(name: str, level: Union[int, str, None] = None,
               log_file: Optional[Union[str, Path]] = None) -> logging.Logger:
    """Return a logger; the first call installs the file and stderr handlers."""
    global _console
    if _console is None:
        path = Path(log_file) if log_file else LOG_FILE
        path.parent.mkdir(parents=True, exist_ok=True)
        logging.getLogger().setLevel(logging.DEBUG)
        fh = _attach(RotatingFileHandler(path, maxBytes=MAX_BYTES, backupCount=BACKUPS, encoding="utf-8"),
                     logging.DEBUG)
        _console = _attach(logging.StreamHandler(), logging.INFO)
        logging.getLogger(__name__).debug("Log file: %s", fh.baseFilename)
    if level is not None:
        set_console_level(level)
    return logging.getLogger(name)


def set_console_level(level: Union[int, str]) -> None:
    """Change the stderr threshold; the file handler keeps logging DEBUG."""
    if isinstance(level, str):
        resolved = logging.getLevelName(level.upper())
        if not isinstance(resolved, int):
            raise ValueError(f"unknown log level {level!r}")
        level = resolved
    if _console is not None:
        _console.setLevel(level)
