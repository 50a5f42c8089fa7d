"""evosurf — verification kernel for calculus on evolving surfaces.

Exact chart-side derivatives (truncated Taylor jets) meet finite-difference
ambient operators built on closest-point extensions; the package's job is to
certify that every identity relating the two coordinate systems — and the
surface Navier–Stokes formulations built on top of them — holds numerically
on a catalog of moving test surfaces.
"""

from .errors import (
    ConfigError,
    ConsistencyError,
    DegenerateMetricError,
    DomainError,
    EvosurfError,
    FoldoverError,
    ImmersionError,
    IncompleteStateError,
    IntegrationError,
    ProjectionAmbiguityError,
    ProjectionConvergenceError,
    RepresentationError,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "EvosurfError", "DomainError", "ImmersionError", "DegenerateMetricError",
    "ProjectionConvergenceError", "ProjectionAmbiguityError",
    "ConsistencyError", "IntegrationError", "RepresentationError",
    "IncompleteStateError", "ConfigError", "FoldoverError",
]
