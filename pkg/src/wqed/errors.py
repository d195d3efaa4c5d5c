"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid physical parameters or configuration values."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class GridTooSmallError(ValueError):
    """Eigenfunctions do not decay before the edge of the position grid."""


class DimensionError(ValueError):
    """A requested Hilbert space exceeds the configured size cap."""


class ConvergenceError(RuntimeError):
    """An iterative numerical procedure failed to converge.

    ``residual`` carries the last achieved residual (or a short history).
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class BandEdgeError(ValueError):
    """A frequency lies on (or outside) the band edge where a formula is singular."""
