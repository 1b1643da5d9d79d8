"""Exception types shared across the package."""


class BalldiffError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(BalldiffError, ValueError):
    """An input violates a documented precondition."""


class ConfigError(ValidationError):
    """A run configuration file is malformed or inconsistent."""


class StabilityError(ValidationError):
    """A stencil coefficient exceeds the explicit-scheme stability bound.

    Signals that the caller must subdivide the time step.
    """


class ResourceLimitError(BalldiffError):
    """A requested grid would exceed the configured node cap."""


class DomainTooSmallError(BalldiffError):
    """Density reached the edge of the computational domain."""
