"""Exception hierarchy shared across the package."""


class DegcalcError(Exception):
    """Base class for all package errors."""


class DomainMismatchError(DegcalcError):
    """Operands live on different base domains (half-line vs unit interval)."""


class EndpointEvalError(DegcalcError):
    """Pointwise evaluation requested at a domain endpoint; use the limit instead."""


class InvalidWeightError(DegcalcError):
    """A candidate weight fails positivity or a required membership condition."""


class PreconditionError(DegcalcError):
    """A mathematical precondition is violated (non-complete weight, non-elliptic
    operator, unbounded reduced potential, ...)."""


class CompositionError(DegcalcError):
    """Groupoid elements are not composable.

    Carries the mismatch distance (or the offending factor name) when known.
    """

    def __init__(self, message, mismatch=None, factor=None):
        super().__init__(message)
        self.mismatch = mismatch
        self.factor = factor


class ChartDomainError(DegcalcError):
    """Input outside the window of a deformation chart."""


class InversionError(DegcalcError):
    """Numeric inversion of a monotone map failed to bracket; carries diagnostics."""


class ConvergenceError(DegcalcError):
    """An iterative solver failed to converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class PropertyViolationError(DegcalcError):
    """Two independent computations of the same quantity disagree beyond tolerance."""


class ConfigError(DegcalcError):
    """Malformed run configuration."""
