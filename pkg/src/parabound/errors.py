"""Exception types shared across the package."""


class ParaboundError(Exception):
    """Base class for all package errors."""


class DimensionError(ParaboundError):
    """Operation requested for an unsupported spatial dimension."""


class ConfigError(ParaboundError):
    """Malformed or inconsistent scenario / solver configuration."""


class NonConvergence(ParaboundError):
    """Nonlinear solve exhausted its iteration budget.

    Carries the last residual and, when raised from a time march, the
    failing time index.  Signals that the time step must shrink.
    """

    def __init__(self, message: str, residual: float = float("nan"),
                 time_index: int | None = None):
        super().__init__(message)
        self.residual = residual
        self.time_index = time_index


class AdmissibilityError(ParaboundError):
    """Exponent configuration violates the admissibility window."""


class RangeError(ParaboundError):
    """Parameter outside the validity range of the requested bound."""


class CylinderOutOfGrid(ParaboundError):
    """A space-time cylinder does not fit inside the grid domain."""


class GridTooCoarse(ParaboundError):
    """Cutoff transition band is unresolved by the grid."""


class BoundaryError(ParaboundError):
    """Field fails a required boundary condition (e.g. lateral zero trace)."""


class InsufficientData(ParaboundError):
    """Not enough sweep points to issue a stability verdict."""
