"""Exception and warning types raised by randflight."""


class RandFlightError(Exception):
    """Base class for all numerical failures in this package."""


class DomainError(RandFlightError, ValueError):
    """An argument lies outside the domain of the operation."""


class TruncationError(RandFlightError):
    """A series did not converge within its term budget.

    ``last_term`` holds the magnitude of the last term that was added, which
    is usually the most useful thing to know when deciding on a larger budget.
    """

    def __init__(self, message: str, last_term: float = float("nan")):
        super().__init__(message)
        self.last_term = last_term


class QuadratureError(RandFlightError):
    """Adaptive quadrature exhausted its subdivision budget."""


class MomentsNotAchievable(RandFlightError):
    """No moment count up to the cap reaches the requested relative error."""

    def __init__(self, message: str, h: int, cap: int):
        super().__init__(message)
        self.h = h
        self.cap = cap


class PrecisionLossWarning(RuntimeWarning):
    """An alternating sum cancelled so badly that most digits are noise."""
