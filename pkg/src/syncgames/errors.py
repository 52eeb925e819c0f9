"""Exception types shared across the package."""

from __future__ import annotations


class SyncGamesError(Exception):
    """Base class for errors raised by this package."""


class IndexOutOfRange(SyncGamesError):
    """A question or answer index falls outside the declared range."""


class SynchronicityViolation(SyncGamesError):
    """A rule table allows differing answers to a repeated question."""


class DensityNotNormalized(SyncGamesError):
    """Question weights are negative or do not sum to one exactly."""


class DimensionMismatch(SyncGamesError):
    """Objects with incompatible question/answer counts were combined."""


class EnumerationTooLarge(SyncGamesError):
    """The deterministic strategy space exceeds the enumeration cap."""


class LPInfeasible(SyncGamesError):
    """The linear program has no feasible point."""


class LPUnbounded(SyncGamesError):
    """The linear program objective is unbounded above."""


class InfeasibleT(SyncGamesError):
    """The requested parameter lies outside the admissible finite set."""


class NotConverged(SyncGamesError):
    """An iterative solver stopped before reaching its tolerance.

    Carries the best iterate found so the caller can inspect residuals.
    """

    def __init__(self, message: str, solution=None):
        super().__init__(message)
        self.solution = solution


class ParseError(SyncGamesError):
    """A game or realization file could not be parsed.

    ``line`` is the 1-based line number of the offending input line, or 0
    when the problem concerns the file as a whole.
    """

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line
