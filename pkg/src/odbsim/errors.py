"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class DegenerateRampError(ValueError):
    """Initial and final frequency coincide; a hold segment should be used instead."""


class UnrealizablePulseError(ValueError):
    """The induced squared frequency went negative somewhere on the ramp."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ResolutionError(ValueError):
    """A state is not resolved by the grid or basis truncation at the required tolerance."""


class GridMismatchError(ValueError):
    """Two states live on incompatible grids."""


class ConvergenceError(RuntimeError):
    """A numerical routine failed to reach its accuracy target."""


class ConfigError(ValueError):
    """Bad or unknown configuration input."""
