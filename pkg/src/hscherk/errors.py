"""Exception hierarchy shared by all hscherk modules.

Validation failures (bad input data, malformed configs) and numerical
failures (integration breakdown, failed brackets) are kept in separate
branches so the CLI can map them to distinct exit codes.
"""


class HscherkError(Exception):
    """Base class for all package errors."""


class ValidationError(HscherkError):
    """Input data violates a documented invariant or schema."""


class ConfigurationError(ValidationError):
    """A geometric / structural precondition does not hold."""


class NumericalError(HscherkError):
    """A numerical procedure failed to produce a certified result."""


class StepUnderflow(NumericalError):
    """Adaptive step fell below the hard floor without resolving an event."""


class BracketFailure(NumericalError):
    """A bisection bracket could not be established."""


class NotFound(NumericalError):
    """A scanned quantity does not exist in the searched range."""


class NoBracket(NumericalError):
    """The center-value sweep of the radial solver could not bracket the target."""


class TooCloseToWall(ValidationError):
    """Barrier evaluated below its truncation distance; value is +/-inf there."""


class CothBoundViolated(ValidationError):
    """Decay profile exceeds (n-1)*coth(r) somewhere; radial barrier undefined."""


class NonIntegrableTail(NumericalError):
    """sup|rho~| reached 1; the radial barrier integral diverges."""
