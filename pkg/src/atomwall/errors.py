"""Exception types shared across the package."""


class ConvergenceError(RuntimeError):
    """An extrapolation ladder or quadrature failed to settle.

    Carries the last two iterates so callers can inspect how far apart
    the ladder ended up.
    """

    def __init__(self, message, last_two=None):
        super().__init__(message)
        self.last_two = last_two


class ConsistencyError(RuntimeError):
    """An internal cross-check failed (e.g. a residual imaginary part
    survived the complex-conjugate pairing)."""


class ConfigError(ValueError):
    """Bad run configuration (unknown key, unparseable value, missing input)."""


class TrajectoryError(ValueError):
    """A trajectory table violates its invariants."""
