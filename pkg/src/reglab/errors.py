"""Domain errors raised by reglab.

All of them derive from ``ValueError`` so callers may catch them broadly.
"""
from __future__ import annotations


class ReglabError(ValueError):
    """Base class for every domain error in the package."""


class ParameterError(ReglabError):
    """A parameter (n, m, a cap, a characteristic) is out of range."""


class CompositionError(ReglabError):
    """Shapes or free modules of two maps do not fit together."""


class HomogeneityError(ReglabError):
    """A matrix entry is not homogeneous of the degree its twists demand."""


class UnsupportedRingError(ReglabError):
    """The ring is not of the kind the operation requires."""


class InsufficientDataError(ReglabError):
    """Too few terms to decide anything about a sequence."""


class PresentationFormatError(ReglabError):
    """A presentation file could not be parsed."""


class InconsistentSystemError(ReglabError):
    """A linear system has no solution."""
