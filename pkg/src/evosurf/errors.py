"""Exception taxonomy for the kernel.

Every failure mode that callers are expected to handle gets its own class so
the suite runner can map them to report entries / exit codes without string
matching.
"""


class EvosurfError(Exception):
    """Base class for all kernel errors."""


class DomainError(EvosurfError):
    """Chart evaluated outside its parameter or time domain, or produced
    non-finite output."""


class ImmersionError(EvosurfError):
    """The tangent vectors are linearly dependent at the requested point:
    ``|g1 x g2|``  fell below the chart's immersion threshold."""


class DegenerateMetricError(EvosurfError):
    """First fundamental form is numerically singular (condition estimate
    above the guard threshold)."""


class ProjectionConvergenceError(EvosurfError):
    """Closest-point Gauss-Newton did not reach tolerance within the
    iteration budget. Carries the best iterate found."""

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


class ProjectionAmbiguityError(EvosurfError):
    """Two well-separated feet realise the same distance (within tolerance);
    the closest point is not unique."""


class ConsistencyError(EvosurfError):
    """Two independent computation pathways for the same quantity disagreed
    beyond tolerance -- almost always a bug in a chart's hand-written closed
    forms (normal/velocity) or in the jet arithmetic itself."""


class IntegrationError(EvosurfError):
    """Trajectory integration could not be set up or carried out (zero or
    non-finite step, absurd step count)."""


class RepresentationError(EvosurfError):
    """Requested a component representation that does not exist for the
    given operator (e.g. mixed components of a non-symmetric tensor)."""


class IncompleteStateError(EvosurfError):
    """A residual evaluator needs a state ingredient (normal-derivative
    pressure, prescribed normal speed, ...) that the flow state does not
    carry."""


class FoldoverError(EvosurfError):
    """A normal offset |ζ| reached the curvature radius: the tubular chart
    R + ζn folds over itself and its metric degenerates."""


class ConfigError(EvosurfError):
    """Invalid suite configuration file (maps to CLI exit code 2)."""
