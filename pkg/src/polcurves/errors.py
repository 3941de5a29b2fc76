"""Exception types shared by all modules."""

from __future__ import annotations


class CurveError(ValueError):
    """Base class for invalid inputs to curve operations."""


class InvalidCurve(CurveError):
    pass


class InvalidSubcurve(CurveError):
    pass


class GenusTooSmall(CurveError):
    pass


class NotConnected(CurveError):
    pass


class TooLarge(CurveError):
    """A scan would exceed the configured size cap."""


class VertexMismatch(CurveError):
    pass


class NoCusp(CurveError):
    pass


class NotQuasiWpStable(CurveError):
    pass


class WrongInputClass(CurveError):
    pass


class NotComparable(CurveError):
    pass


class NotBalanced(CurveError):
    pass


class NotProperlyBalanced(CurveError):
    pass


class Unsupported(CurveError):
    pass


class SearchExhausted(RuntimeError):
    """A search that should always succeed came back empty."""


class NonTermination(RuntimeError):
    """An iterative construction hit its iteration cap."""
