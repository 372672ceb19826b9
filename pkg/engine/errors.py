"""
Exception hierarchy for the tempered stable toolkit.

Divergent integrals inside ``validate`` are reported as violations, not raised.
Everything else that cannot be computed raises one of the classes below.
"""

from typing import List, Optional


class TemperedStableError(Exception):
    """Base class for all library errors."""
    pass


class DomainError(TemperedStableError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""
    pass


class InvalidMeasureError(TemperedStableError):
    """The Rosinski measure does not define a Levy measure for the given alpha."""

    def __init__(self, message: str, violations: Optional[List] = None):
        super().__init__(message)
        self.violations = list(violations or [])


class NotProperError(TemperedStableError):
    """The integral of |x|^alpha against R diverges."""
    pass


class MomentInfiniteError(TemperedStableError):
    """The requested moment or cumulant does not exist."""
    pass


class UnsupportedParameterError(TemperedStableError):
    """No criterion is available for this parameter combination."""
    pass


class ParameterMismatchError(TemperedStableError, ValueError):
    pass


class ZeroTailError(TemperedStableError):
    """A ray carries no Levy mass beyond the truncation radius."""
    pass


class InsufficientSamplesError(TemperedStableError):
    pass


class IndexOutOfRangeError(TemperedStableError):
    """The regular variation index is outside the range the experiment supports."""
    pass


class NonMonotoneError(TemperedStableError, ValueError):
    pass


class UnknownDirectionError(TemperedStableError, KeyError):
    pass


class ParamsFileError(TemperedStableError):
    """A parameter file could not be read or does not match the schema."""
    pass


__all__ = [
    "TemperedStableError",
    "DomainError",
    "InvalidMeasureError",
    "NotProperError",
    "MomentInfiniteError",
    "UnsupportedParameterError",
    "ParameterMismatchError",
    "ZeroTailError",
    "InsufficientSamplesError",
    "IndexOutOfRangeError",
    "NonMonotoneError",
    "UnknownDirectionError",
    "ParamsFileError",
]
