"""Exception hierarchy for szeta.

Every domain error maps to CLI exit code 1 with the class name as the
machine-readable error identifier.
"""


class SzetaError(Exception):
    """Base class for all szeta domain errors."""


class InvalidAngle(SzetaError):
    """Angle outside the range that produces a valid circle family."""


class DisjointnessViolation(SzetaError):
    """Closed discs overlap: the group is not convex co-compact."""


class OrthogonalityViolation(SzetaError):
    """A supplied circle is not orthogonal to the unit circle."""


class CayleyPoleInsideDisc(SzetaError):
    """The point mapped to infinity lies inside a disc, so the disc has
    no bounded image on the real line."""


class NoConvergence(SzetaError):
    """An iterative solve did not converge within its iteration budget."""


class NotContracting(SzetaError):
    """An orbit multiplier came out >= 1; the configuration does not
    define a uniformly contracting system."""


class NoSignChange(SzetaError):
    """The downward scan found no sign change of Z on (0, 1)."""


class MaxIterations(SzetaError):
    """Root refinement exceeded its iteration budget."""


class ZeroDenominator(SzetaError):
    """Z(s) = 0 at an evaluation point where Z'/Z is required."""


class ContourNearZero(SzetaError):
    """|Z| dips below the safety floor on an integration contour."""


class NonIntegerResult(SzetaError):
    """A contour count failed to stabilise on an integer."""


class BracketFailure(SzetaError):
    """The Bowen solve has no sign change on [0, 1]."""


class CacheError(SzetaError):
    """An orbit-table cache file is unreadable or does not match the
    requested group and truncation order."""


class ConfigError(SzetaError):
    """A run-configuration file is malformed or contains unknown keys."""
