from __future__ import annotations

from typing import Optional


class TopoError(Exception):
    """Base class for every error raised by the engine."""


class ParameterError(TopoError, ValueError):
    """Invalid input value (out-of-range parameter, bad index, non-finite force)."""


class SolveError(TopoError):
    """The constrained finite-element system could not be solved."""


class NumericError(TopoError):
    """A numerical procedure failed to bracket or converge."""


class FormatError(TopoError):
    """A dataset container is malformed; names the offending sample if known."""

    def __init__(self, message: str, sample_index: Optional[int] = None):
        self.sample_index = sample_index
        if sample_index is not None:
            message = f"sample {sample_index}: {message}"
        super().__init__(message)
