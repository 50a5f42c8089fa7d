"""Deliberate-defect switches for negative-control runs.

The verification suite must be able to demonstrate that its checks have
teeth: flipping one of these switches injects a known bug into exactly one
formula, and at least one named check is expected to turn red.  All
switches default to off and are only ever enabled through
:func:`enabled`-guarded code paths, so production behaviour is untouched.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Iterator

# Known defect switches.  Keep this list in sync with the docstrings of the
# guarded code sites.
KNOWN = (
    # drop the transpose when feeding a tensor to the ambient row-wise
    # divergence (ambient_ops.div_hat_tensor_of_transpose)
    "drop_tensor_transpose",
    # flip the sign of the second fundamental form (geometry.SurfacePoint.b_lo)
    "flip_curvature_sign",
    # drop the pressure-curvature normal term from the momentum residual
    # (navier_stokes.residual_full)
    "drop_pressure_curvature",
)

_active: set[str] = set()


def enabled(name: str) -> bool:
    """True when the named defect is currently switched on."""
    if name not in KNOWN:
        raise KeyError(f"unknown sabotage switch {name!r}")
    return name in _active


def active() -> tuple[str, ...]:
    """Currently enabled switches, sorted."""
    return tuple(sorted(_active))


@contextmanager
def enable(*names: str) -> Iterator[None]:
    """Enable the named defects inside a ``with`` block."""
    for name in names:
        if name not in KNOWN:
            raise KeyError(f"unknown sabotage switch {name!r}")
    fresh = [n for n in names if n not in _active]
    _active.update(fresh)
    try:
        yield
    finally:
        _active.difference_update(fresh)
