from __future__ import annotations

from typing import Any, Optional


class NCTorusError(Exception):
    """Base class for every domain error raised by the workbench."""


class DimensionMismatchError(NCTorusError, ValueError):
    pass


class PhaseOverflowError(NCTorusError, OverflowError):
    pass


class InvalidInputError(NCTorusError, ValueError):
    pass


class TruncationTooLargeError(NCTorusError, MemoryError):
    pass


class ConvergenceError(NCTorusError, RuntimeError):
    """Iteration cap reached; `last_iterate` holds the final estimate."""

    def __init__(self, message: str, last_iterate: Optional[Any] = None):
        super().__init__(message)
        self.last_iterate = last_iterate


class NotDiagonallyDominantError(NCTorusError, ValueError):
    pass


class SingularTruncationError(NCTorusError, RuntimeError):
    pass


class InsufficientSupportError(NCTorusError, ValueError):
    pass


class FloatModeError(NCTorusError, ValueError):
    pass


class ConfigError(NCTorusError, ValueError):
    pass
