"""Exception types shared across the package."""


class NanotrapError(Exception):
    """Base class for all package errors."""


class DomainError(NanotrapError, ValueError):
    """An argument or evaluation point lies outside the model's valid domain."""


class NumericalInstabilityError(NanotrapError, ArithmeticError):
    """A conditioning guard tripped (ill-conditioned matrix, defective eigenbasis)."""

    def __init__(self, message, module=None, guard=None):
        super().__init__(message)
        self.module = module
        self.guard = guard


class ConvergenceError(NumericalInstabilityError):
    """A series failed to converge below the hard truncation ceiling."""


class DegenerateTrapError(NumericalInstabilityError):
    """Curvature at a refined minimum is not positive."""


class ConfigError(NanotrapError, ValueError):
    """Invalid run configuration. ``where`` names the offending line or argument."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)
