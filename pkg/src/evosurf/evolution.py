"""Kinematics of the moving surface.

This module owns everything that involves the time variable: material
trajectories, material derivatives in both coordinate systems, the
metric-rate tensor (half the time derivative of the first fundamental
form), and the transport rule for surface integrals.

Time enters the jet system as a third independent variable, so the
curvilinear material derivative ∂_t f̄(ξ, t) and the metric rate
½ ∂_t g_αβ come out exact — no finite differencing.  The Cartesian
pathway (∂_t fᵉ + ∇̂fᵉ·v, evaluated through closest-point extensions and
central differences) is kept deliberately separate so the two can be
compared as independent computations.

The parametrisations in the chart catalog are material: ∂_t R(ξ, t) is
the velocity of the particle at R(ξ, t).  Derivatives along a *different*
ambient velocity w are reduced to chart derivatives through the extension
calculus: ḟ|_w = ∂_t f̄ + a^α ∂_α f̄ with a = P(w − ∂_tR), since a
constant-normal extension has no derivative along n.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from . import curv_ops as C
from . import jets as J
from .ambient_ops import ExtensionStencil
from .charts import Chart, closest_point
from .errors import IntegrationError
from .geometry import SurfacePoint, value_of

__all__ = [
    "material_jet",
    "material_derivative",
    "metric_rate",
    "metric_rate_operator",
    "FlowResult",
    "integrate_flow",
    "surface_integral",
    "LeibnizReport",
    "leibniz_residual",
]


def _eval(f, sp):
    return f(sp) if callable(f) else f


# ----------------------------------------------------------------------
# material derivatives
# ----------------------------------------------------------------------

def material_jet(field, sp: SurfacePoint, w=None):
    """Material derivative as a jet (one order below the field's).

    With ``w=None`` this is the derivative along the chart's own material
    flow, i.e. the exact ∂_t slot of the field's jet.  With an ambient
    velocity field ``w`` the relative tangential advection a^α ∂_α f̄ is
    added, a = P(w − ∂_tR); the normal part of w − ∂_tR drops out because
    constant-normal extensions are flat along n.
    """
    f = _eval(field, sp)
    if not isinstance(f, J.Jet):
        return np.zeros(np.shape(f))       # constants have no rates
    dot = J.partial(f, 2)
    if w is None:
        return dot
    rel = _eval(w, sp) - sp.velocity
    gc1, gc2 = sp.g_con
    a1, a2 = J.dot(rel, gc1), J.dot(rel, gc2)
    d0, d1 = J.partial(f, 0), J.partial(f, 1)
    pad = (...,) + (None,) * (np.ndim(value_of(d0)) - np.ndim(value_of(a1)))
    return dot + a1[pad] * d0 + a2[pad] * d1


def material_derivative(
    field,
    sp: SurfacePoint,
    pathway: str = "curvilinear",
    *,
    w=None,
    h_t: float = 1e-4,
    h: float | None = None,
):
    """Material derivative values via one of two independent pathways.

    ``curvilinear``
        Exact: the ∂_t slot of the (ξ¹, ξ², t) jet, plus relative
        advection when ``w`` is given.

    ``cartesian``
        ḟ = ∂_t fᵉ + ∇̂fᵉ·w with the time slope by central differences of
        the moving extension fᵉ(x, t±h_t) = f(π(x, t±h_t), t±h_t) at
        frozen ambient x, and the spatial gradient from an
        :class:`~evosurf.ambient_ops.ExtensionStencil`.  FD-limited
        accuracy O(h_t² + h²).
    """
    if pathway == "curvilinear":
        return value_of(material_jet(field, sp, w))
    if pathway != "cartesian":
        raise ValueError(f"unknown material-derivative pathway {pathway!r}")

    chart, t = sp.chart, float(sp.t)
    params = sp.params
    flat = value_of(sp.pos).reshape(-1, 3)
    seed = np.ascontiguousarray(params.reshape(-1, 2))

    vals = []
    for tt in (t + h_t, t - h_t):
        res = closest_point(chart, flat, tt, seed=seed)
        p = res.params.reshape(params.shape)
        sp_t = SurfacePoint(chart, p[..., 0], p[..., 1], tt)
        vals.append(value_of(_eval(field, sp_t)))
    dft = (vals[0] - vals[1]) / (2.0 * h_t)

    st = ExtensionStencil(chart, params, t, h, center=sp)
    grad = st.gradient(lambda q: _eval(field, q))
    wv = value_of(sp.velocity) if w is None else value_of(_eval(w, sp))
    if grad.ndim == wv.ndim:                       # scalar field
        adv = np.einsum("...j,...j->...", grad, wv)
    else:                                          # vector: ∂_j last
        adv = np.einsum("...ij,...j->...i", grad, wv)
    return dft + adv


# ----------------------------------------------------------------------
# metric rate
# ----------------------------------------------------------------------

def metric_rate(sp: SurfacePoint, pathway: str = "time_jet") -> np.ndarray:
    """Covariant metric-rate components E_αβ = ½ ∂_t g_αβ, shape (..., 2, 2).

    Three genuinely different routes to the same tensor:

    ``time_jet``
        ½ × the exact ∂_t slot of the metric jet.
    ``strain``
        Covariant components g_α · E · g_β of the strain operator
        E = ½(∇_Γ v̄ + ∇_Γᵀ v̄) of the chart velocity.
    ``components``
        ½(v_{β|α} + v_{α|β}) − v₃ b_αβ from covariant derivatives of the
        chart velocity's components (the Christoffel route).
    """
    if pathway == "time_jet":
        return 0.5 * value_of(J.partial(sp.metric_lo, 2))

    vel = lambda q: q.velocity
    if pathway == "strain":
        grad = C.covariant_derivative(vel, sp)
        e_op = 0.5 * (value_of(grad) + np.swapaxes(value_of(grad), -1, -2))
        g1, g2 = value_of(sp.g1), value_of(sp.g2)
        g = np.stack([g1, g2], axis=-2)
        return np.einsum("...ai,...ij,...bj->...ab", g, e_op, g)
    if pathway == "components":
        cd = C.component_derivatives(vel, sp)
        bar = cd.u_cov_bar
        return 0.5 * (bar + np.swapaxes(bar, -1, -2)) - (
            cd.u_n[..., None, None] * value_of(sp.b_lo)
        )
    raise ValueError(f"unknown metric-rate pathway {pathway!r}")


def metric_rate_operator(sp: SurfacePoint, pathway: str = "time_jet") -> np.ndarray:
    """The metric rate as a 3×3 operator E = E_αβ g^α ⊗ g^β (values)."""
    e_lo = metric_rate(sp, pathway)
    gc1, gc2 = (value_of(g) for g in sp.g_con)
    gc = np.stack([gc1, gc2], axis=-2)
    return np.einsum("...ab,...ai,...bj->...ij", e_lo, gc, gc)


# ----------------------------------------------------------------------
# trajectories
# ----------------------------------------------------------------------

class FlowResult(NamedTuple):
    x: np.ndarray               # endpoint positions, shape of the input
    params: np.ndarray          # chart parameters of the projected endpoints
    error_estimate: np.ndarray  # per-point Richardson estimate (∞ norm)
    steps: int                  # fine-solution step count


def integrate_flow(
    chart: Chart,
    x0,
    t0: float = 0.0,
    t1: float = 1.0,
    *,
    dt: float | None = None,
    richardson: bool = True,
) -> FlowResult:
    """Material trajectories ẋ = v(π(x, t), t) by classical fixed-step RK4.

    The velocity is the constant-normal extension of the chart's material
    velocity, so each stage costs one warm-seeded closest-point solve.
    With ``richardson=True`` the integration is repeated at half the step
    and the coarse/fine gap divided by 2⁴−1 is reported as the error
    estimate (the fine solution is returned).
    """
    x0 = np.asarray(x0, dtype=float)
    single = x0.ndim == 1
    X0 = x0.reshape(-1, 3)
    span = float(t1 - t0)
    if span == 0.0:
        res = closest_point(chart, X0, t0)
        est = np.zeros(X0.shape[0])
        if single:
            return FlowResult(x0, res.params[0], est[0], 0)
        return FlowResult(x0, res.params, est, 0)

    if dt is None:
        dt = 1e-3 * abs(span)
    if not np.isfinite(dt) or dt <= 0.0:
        raise IntegrationError(f"bad step dt={dt!r}")
    n = max(1, int(round(abs(span) / dt)))
    if n > 10_000_000:
        raise IntegrationError(f"step dt={dt:g} implies {n} RK4 steps")

    def velocity(x, t, seed):
        res = closest_point(chart, x, t, seed=seed)
        sp = SurfacePoint(chart, res.params[:, 0], res.params[:, 1], t, order=1)
        return value_of(sp.velocity), res.params

    def run(nsteps):
        h = span / nsteps
        x = X0.copy()
        seed = closest_point(chart, x, t0).params
        for k in range(nsteps):
            t = t0 + k * h
            k1, seed = velocity(x, t, seed)
            k2, _ = velocity(x + 0.5 * h * k1, t + 0.5 * h, seed)
            k3, _ = velocity(x + 0.5 * h * k2, t + 0.5 * h, seed)
            k4, _ = velocity(x + h * k3, t + h, seed)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return x

    coarse = run(n)
    if richardson:
        fine = run(2 * n)
        est = np.abs(fine - coarse).max(axis=-1) / 15.0
        x_end, steps = fine, 2 * n
    else:
        est = np.full(X0.shape[0], np.nan)
        x_end, steps = coarse, n

    res = closest_point(chart, x_end, t1)
    if single:
        return FlowResult(x_end[0], res.params[0], est[0], steps)
    return FlowResult(x_end.reshape(x0.shape), res.params.reshape(x0.shape[:-1] + (2,)),
                      est.reshape(x0.shape[:-1]), steps)


# ----------------------------------------------------------------------
# transport rule
# ----------------------------------------------------------------------

def _gauss_nodes(chart: Chart, region, order_u: int, order_v: int):
    if region is None:
        region = chart.domain
    (a1, b1), (a2, b2) = region
    xu, wu = np.polynomial.legendre.leggauss(order_u)
    xv, wv = np.polynomial.legendre.leggauss(order_v)
    u = 0.5 * (b1 - a1) * xu + 0.5 * (b1 + a1)
    v = 0.5 * (b2 - a2) * xv + 0.5 * (b2 + a2)
    wu = wu * 0.5 * (b1 - a1)
    wv = wv * 0.5 * (b2 - a2)
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv)
    return U.ravel(), V.ravel(), W.ravel()


def surface_integral(
    chart: Chart,
    field,
    t: float = 0.0,
    *,
    order_u: int = 24,
    order_v: int = 48,
    region=None,
) -> float:
    """∫ f dA over the image of a chart rectangle by tensor Gauss–Legendre.

    The area element is √det g.  ``field`` may be a SurfaceField, a
    callable of the point, or a constant.
    """
    u, v, w = _gauss_nodes(chart, region, order_u, order_v)
    sp = SurfacePoint(chart, u, v, t)
    dens = np.sqrt(value_of(sp.metric_det))
    f = field(sp) if callable(field) else field
    return float(np.sum(w * value_of(f) * dens))


class LeibnizReport(NamedTuple):
    ddt: float       # d/dt ∫ f dA by central FD in t
    transport: float  # ∫ (ḟ + f div_Γ v̄) dA at time t
    residual: float  # |ddt − transport|
    area: float      # ∫ 1 dA at time t


def leibniz_residual(
    chart: Chart,
    field,
    t: float = 0.0,
    *,
    order_u: int = 24,
    order_v: int = 48,
    region=None,
    h_t: float = 1e-4,
) -> LeibnizReport:
    """Transport-rule residual |d/dt ∫ f − ∫ (ḟ + f div_Γ v̄)|.

    The chart rectangle is a material region (the parametrisation moves
    with the flow), so no boundary flux appears.  The left side uses
    central differencing in t with step ``h_t``; the right side is exact
    up to quadrature.
    """
    lo = surface_integral(chart, field, t - h_t,
                          order_u=order_u, order_v=order_v, region=region)
    hi = surface_integral(chart, field, t + h_t,
                          order_u=order_u, order_v=order_v, region=region)
    ddt = (hi - lo) / (2.0 * h_t)

    u, v, w = _gauss_nodes(chart, region, order_u, order_v)
    sp = SurfacePoint(chart, u, v, t)
    dens = np.sqrt(value_of(sp.metric_det))
    fdot = value_of(material_jet(field, sp))
    fval = value_of(_eval(field, sp))
    divv = C.div_vector(lambda q: q.velocity, sp)
    transport = float(np.sum(w * (fdot + fval * divv) * dens))
    area = float(np.sum(w * dens))
    return LeibnizReport(ddt, transport, abs(ddt - transport), area)
