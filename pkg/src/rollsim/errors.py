"""Exception types shared across the package.

Errors raised while stepping a trajectory may carry two extra attributes,
set by the integrator before re-raising: ``time`` (the simulation time at
which the failure occurred) and ``partial`` (the trajectory accumulated so
far).
"""


class RollingBodyError(Exception):
    """Base class for all rollsim errors."""

    time: float | None = None
    partial = None


class DegenerateChart(RollingBodyError):
    """The chart jacobian is rank deficient (cross product below threshold)."""


class ChartBoundary(RollingBodyError):
    """A chart coordinate left the open domain rectangle."""


class SingularLambda(RollingBodyError):
    """The contact operator is numerically singular (loss of regularity)."""


class SingularShapeOperator(RollingBodyError):
    """The body shape operator is numerically singular (flat point)."""


class NotPlanarScene(RollingBodyError):
    """Operation requires the world surface to be the horizontal plane."""


class ProjectionDiverged(RollingBodyError):
    """Constraint projection failed to restore feasibility."""
