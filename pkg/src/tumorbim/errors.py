"""Exception types shared across the package."""


class DegenerateCurveError(ValueError):
    """The curve's arclength derivative fell below the machine-noise guard."""


class ReparametrizationError(RuntimeError):
    """Newton iteration for equal-arclength markers failed to converge."""


class GeometryError(ValueError):
    """A shape descriptor produced an invalid curve (non-positive radius,
    self-intersection, or a tumor not strictly inside the far-field boundary)."""


class SolverConvergenceError(RuntimeError):
    """A boundary-integral linear solve did not reach the requested residual.

    Carries the achieved residual so drivers can stop a run gracefully.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class InstabilityError(RuntimeError):
    """Time stepping produced a non-positive arclength or non-finite state."""


class ConfigError(ValueError):
    """A configuration file failed validation; names the offending field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
