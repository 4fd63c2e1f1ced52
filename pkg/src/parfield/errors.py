"""Exception types shared across the package."""


class ParfieldError(Exception):
    """Base class for all package-specific errors."""


class DomainError(ParfieldError, ValueError):
    """Input outside the physically meaningful domain."""


class PoleError(ParfieldError, ZeroDivisionError):
    """Evaluation requested exactly on a pole (complete cyclotron orbit)."""


class NoRealSolutionError(ParfieldError):
    """No real classical solution exists for the requested configuration."""


class ConvergenceError(ParfieldError):
    """An iterative scheme failed to reach the requested tolerance."""

    def __init__(self, message, partial=None, terms_used=None):
        super().__init__(message)
        self.partial = partial
        self.terms_used = terms_used


class UnsupportedRegionError(ParfieldError):
    """Requested evaluation in a region the method does not support."""


class RefinementError(ParfieldError):
    """Adaptive sampling could not satisfy its resolution target."""
