"""Independent numerical helpers used to cross-check the package.

Everything here is deliberately primitive — plain central differences and
least-squares slope fits on top of raw ``chart.map`` / plain callables —
so that agreement with the jet-based machinery constitutes a genuinely
independent route, not a reflection of the same code path.
"""

from __future__ import annotations

import numpy as np


def central_diff(f, x: float, h: float = 1e-5) -> float:
    """First derivative of a scalar function of one variable."""
    return (f(x + h) - f(x - h)) / (2.0 * h)


def central_diff2(f, x: float, h: float = 1e-4) -> float:
    """Second derivative by the standard three-point stencil."""
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def fd_gradient(f, x, h: float = 1e-6) -> np.ndarray:
    """Componentwise central-difference gradient of f: R^n -> R."""
    x = np.asarray(x, float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def fd_jacobian(f, x, h: float = 1e-6) -> np.ndarray:
    """Rows ∂f_i/∂x_j of f: R^n -> R^m by central differences."""
    x = np.asarray(x, float)
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2.0 * h))
    return np.stack(cols, axis=-1)


def loglog_slope(steps, errors) -> float:
    """Least-squares slope of log(error) against log(step)."""
    hs = np.log(np.asarray(steps, float))
    es = np.log(np.maximum(np.asarray(errors, float), 1e-300))
    A = np.stack([hs, np.ones_like(hs)], axis=-1)
    sol, *_ = np.linalg.lstsq(A, es, rcond=None)
    return float(sol[0])
