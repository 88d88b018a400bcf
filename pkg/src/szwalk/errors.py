"""Exception types shared across the package."""


class SZWalkError(Exception):
    """Base class for all package errors."""


class ValidationError(SZWalkError, ValueError):
    """An input violates a documented precondition or type invariant."""


class NumericError(SZWalkError, ArithmeticError):
    """A numerical routine failed to reach its accuracy target."""


class AccuracyError(SZWalkError):
    """Result accuracy cannot be guaranteed (e.g. too much pruned mass)."""


class ResourceLimitError(SZWalkError):
    """A configured budget (path count, live branches) was exceeded."""


class UnsupportedConfigurationError(SZWalkError):
    """The requested computation is unavailable for this configuration."""
