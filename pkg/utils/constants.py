"""Shared constants for the tempered stable toolkit."""

from __future__ import annotations

# Exit codes of the command-line tool
EXIT_OK = 0
EXIT_FAILURE = 1  # domain error or invalid measure
EXIT_PARSE = 2  # unreadable or malformed input

# 17 significant digits round-trip every binary64
CSV_FLOAT_FORMAT = "%.17g"

DEFAULT_TAIL_GRID = "0.01:100:50log"
DEFAULT_CF_GRID = "-10:10:41lin"

__all__ = ["EXIT_OK", "EXIT_FAILURE", "EXIT_PARSE", "CSV_FLOAT_FORMAT", "DEFAULT_TAIL_GRID", "DEFAULT_CF_GRID"]
