"""Exception types raised by the constitutive library."""


class TriaxDamageError(Exception):
    """Base class for every error raised by :mod:`triaxdamage`."""


class DegenerateStressError(TriaxDamageError, ValueError):
    """A gradient was requested at a stress with (numerically) zero deviator."""


class LodeSingularityError(TriaxDamageError, ValueError):
    """The raw Lode-parameter gradient is singular (``|sin 3θ|`` below the guard)."""


class SaturatedDamageError(TriaxDamageError, ValueError):
    """The degradation factor ``1 - h D`` is not positive."""


class NegativeStrainError(TriaxDamageError, ValueError):
    """Equivalent plastic strain must be nonnegative."""


class ConvergenceError(TriaxDamageError, RuntimeError):
    """An iterative solve did not reach its tolerance.

    ``residual`` carries the last residual norm so callers can report it.
    """

    def __init__(self, message, residual=float("nan"), detail=None):
        super().__init__(message)
        self.residual = residual
        self.detail = detail


class InsufficientDataError(TriaxDamageError, ValueError):
    """Too few (or degenerate) data points for a fit."""
