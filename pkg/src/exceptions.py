"""
Error taxonomy for the coded caching toolkit
"""

from typing import Optional, Tuple


class CodedCachingError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidConfigError(CodedCachingError):
    """Network or experiment configuration violates its constraints."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class InvalidInputError(CodedCachingError):
    """Realizations or vertex ids that do not fit together."""


class ColoringValidityError(CodedCachingError):
    """Two adjacent vertices share a color (or a vertex is uncolored)."""

    def __init__(self, message: str, edge: Optional[Tuple[int, int]] = None):
        self.edge = edge
        super().__init__(message)


class GraphTooLargeError(CodedCachingError):
    """Exhaustive search refused because the graph exceeds the size guard."""


class FieldTooSmallError(CodedCachingError):
    """Not enough distinct nonzero field points for the requested code."""


class DimensionMismatchError(CodedCachingError):
    """Coding matrix, coloring and codeword shapes disagree."""


class DecodeError(CodedCachingError):
    """A receiver's local linear system is rank deficient."""


class InvariantBreachError(CodedCachingError):
    """A trial produced a result that violates a hard invariant."""
