"""Exception hierarchy shared by all specbound modules."""


class SpecboundError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SpecboundError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(DomainError):
    """A requested target value is outside the reachable range of a map."""


class NumericError(SpecboundError):
    """A quadrature or integration routine failed to converge."""


class InvalidModelError(SpecboundError):
    """A warping model violates a structural requirement (e.g. f <= 0)."""


class InvalidProfileError(SpecboundError):
    """An isoperimetric profile is unusable (vanishes, not increasing, ...)."""


class SearchError(NumericError):
    """An eigenvalue or root search failed to bracket its target."""


class ConfigError(SpecboundError):
    """A run configuration failed validation."""

    def __init__(self, message, path=None):
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path
