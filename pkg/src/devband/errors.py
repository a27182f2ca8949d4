"""Exception types shared across the package."""


class DevbandError(Exception):
    """Base class for all devband errors."""


class NonPositive(DevbandError):
    """A length-like input that must be positive was not."""


class InfeasibleDiameter(DevbandError):
    """Rod diameter too large for the requested midline length."""


class InfeasibleWidth(DevbandError):
    """Half-width exceeds the geometric maximum for (length, diameter)."""


class DegenerateDiameter(DevbandError):
    """d = 0: there is nothing to wrap the band around."""


class BadSampleCount(DevbandError):
    """Sample count must be >= 12 and divisible by 6."""


class DegenerateEdge(DevbandError):
    """Consecutive polygon points coincide."""


class TooFewPoints(DevbandError):
    """A polygon needs at least 6 distinct points."""


class NotClosed(DevbandError):
    """Operation requires a closed curve."""


class SingularDensity(DevbandError):
    """Bending density (K^2+W^2)^2/K^2 is singular: K = 0 with W != 0."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ZeroWidth(DevbandError):
    """Surface energy of a zero-width band is ill-defined; use the line energy."""


class UndefinedRuling(DevbandError):
    """Ruling direction cannot be determined over too long a span."""


class LostTopology(DevbandError):
    """Optimizer iterate left the one-sided (Moebius) class."""


class LineSearchFailed(DevbandError):
    """Backtracking found no decrease at the minimum step size."""
