"""Per-point differential geometry of a chart.

``SurfacePoint`` bundles everything the operator modules need at one chart
point (or a whole batch of points — every quantity broadcasts): tangent
bases, metric and inverse, unit normal, projector, second fundamental form,
shape operator, curvatures, Christoffel symbols.  Quantities are produced
as jets wherever the chart allows it, so downstream code can differentiate
expressions *containing* them once more (divergences of curvature-bearing
tensors need exactly that).

Index and sign conventions
--------------------------
* Greek indices α, β ∈ {1, 2} label the surface parameters; covariant
  tangents are g_α = ∂_αR and the normal n = g₁×g₂/‖g₁×g₂‖ completes both
  bases: g₃ = g³ = n.
* Second fundamental form b_αβ = n·∂_α g_β = −∂_α n·g_β; mixed components
  raise the second index, b_α^β = g^{βσ} b_{σα}; the shape operator is
  B = b_αβ (g^α ⊗ g^β) with κ = tr B = b_α^α (the *doubled* mean
  curvature) and K = det(b_α^β).  On the standard spherical chart of the
  unit sphere this orientation gives B = −P, κ = −2, K = +1.
* Christoffel symbols Γ^σ_αβ come in two independent pathways (tangent
  projection vs. metric derivatives); they must agree to ~1e−10 and the
  test-suite asserts that on every catalog surface.

Derivative bookkeeping: the position jet is order 2, so tangents are
order-1 jets (one more exact derivative available) and anything built from
them differentiates once.  Curvature as a *differentiable* quantity needs
one extra order, which a generic chart cannot supply — charts therefore
carry closed-form ``normal`` maps, evaluated in the same jet frame and
cross-checked against the g₁×g₂ construction at every build.
"""

from __future__ import annotations

from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import jets as J
from . import sabotage
from .charts import Chart, chart_state
from .errors import ConsistencyError, DegenerateMetricError

__all__ = ["SurfacePoint", "Frame", "ShapeData", "frame", "shape_and_curvature"]

_EYE3 = np.eye(3)


def value_of(x):
    """Plain array view of a jet or array."""
    return x.value if isinstance(x, J.Jet) else np.asarray(x, float)


class SurfacePoint:
    """Lazily evaluated geometric state of a chart at (ξ¹, ξ², t).

    Accepts scalars or arrays for the parameters; every derived quantity
    keeps the batch shape in front of its tensor axes.  Construction
    evaluates the position jet eagerly (with domain/immersion guards);
    everything else is computed on first access and cached.
    """

    def __init__(self, chart: Chart, xi1, xi2, t=0.0, order: int = 2,
                 check: bool = True):
        self.chart = chart
        self.order = order
        self.v1, self.v2, self.vt, self.pos = chart_state(
            chart, xi1, xi2, t, order=order, check=check)
        self.params = np.stack(
            np.broadcast_arrays(self.v1.value, self.v2.value), axis=-1)
        self.t = np.asarray(t, float)

    # -- bases ------------------------------------------------------------

    @cached_property
    def g1(self):
        return J.partial(self.pos, 0)

    @cached_property
    def g2(self):
        return J.partial(self.pos, 1)

    @cached_property
    def velocity(self):
        """Material velocity v̄ = ∂R/∂t as the highest-order jet available.

        Uses the chart's closed form when present (order 2, needed to
        differentiate kinematic quantities) after checking it against the
        time slot of the position jet.
        """
        vbar = J.partial(self.pos, 2)
        if self.chart.velocity is None:
            return vbar
        v = self.chart.velocity(self.v1, self.v2, self.vt)
        err = np.max(np.abs(value_of(v) - value_of(vbar)), initial=0.0)
        if err > 1e-12 * (1.0 + self.chart.scale):
            raise ConsistencyError(
                f"chart {self.chart.name!r}: closed-form velocity deviates "
                f"from ∂R/∂t by {err:.3e}")
        return v

    @cached_property
    def normal(self):
        """Unit normal, n = g₁×g₂/‖·‖ by convention.

        Returns the chart's closed form (an order-2 jet) when available,
        cross-checked against the defining cross product; otherwise the
        cross product itself as an order-1 jet.
        """
        cr = J.cross(self.g1, self.g2)
        n_def = cr / J.norm(cr)[..., None]
        if self.chart.normal is None:
            return n_def
        n = self.chart.normal(self.v1, self.v2, self.vt)
        err = np.max(np.abs(value_of(n) - value_of(n_def)), initial=0.0)
        if err > 1e-10:
            raise ConsistencyError(
                f"chart {self.chart.name!r}: closed-form normal deviates "
                f"from g₁×g₂/‖g₁×g₂‖ by {err:.3e}")
        return n

    # -- first fundamental form -------------------------------------------

    @cached_property
    def metric_lo(self):
        """Covariant metric g_αβ as a (..., 2, 2) jet."""
        g11 = J.dot(self.g1, self.g1)
        g12 = J.dot(self.g1, self.g2)
        g22 = J.dot(self.g2, self.g2)
        return J.stack([J.stack([g11, g12], -1), J.stack([g12, g22], -1)], -2)

    @cached_property
    def metric_det(self):
        m = self.metric_lo
        return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 0, 1]

    @cached_property
    def metric_hi(self):
        """Contravariant metric g^{αβ}, closed-form 2×2 inverse with a
        condition-number guard at 1e12."""
        m = self.metric_lo
        a, b, c = m[..., 0, 0], m[..., 0, 1], m[..., 1, 1]
        av, bv, cv = value_of(a), value_of(b), value_of(c)
        mean = 0.5 * (av + cv)
        half_gap = np.sqrt(np.maximum(0.0, (0.5 * (av - cv)) ** 2 + bv * bv))
        lo = mean - half_gap
        with np.errstate(divide="ignore", invalid="ignore"):
            cond = np.where(lo > 0.0, (mean + half_gap) / np.where(lo > 0, lo, 1.0),
                            np.inf)
        if np.any(~(cond < 1e12)):
            raise DegenerateMetricError(
                f"chart {self.chart.name!r}: metric condition number "
                f"{float(np.max(cond)):.3e} exceeds 1e12")
        det = a * c - b * b
        row0 = J.stack([c / det, -b / det], -1)
        row1 = J.stack([-b / det, a / det], -1)
        return J.stack([row0, row1], -2)

    @cached_property
    def g_con(self):
        """Contravariant basis (g¹, g²) with g^α = g^{αβ} g_β."""
        gh = self.metric_hi
        gc1 = self.g1 * gh[..., 0, 0, None] + self.g2 * gh[..., 0, 1, None]
        gc2 = self.g1 * gh[..., 1, 0, None] + self.g2 * gh[..., 1, 1, None]
        return gc1, gc2

    @cached_property
    def projector(self):
        """Tangential projector P = I − n⊗n as a (..., 3, 3) jet."""
        n = self.normal
        return _EYE3 - J.outer(n, n)

    # -- second fundamental form & curvature --------------------------------

    @cached_property
    def b_lo(self):
        """Covariant second fundamental form b_αβ.

        Jet-valued via b_αβ = −∂_αn·g_β when the chart has a closed-form
        normal (the only route that leaves a derivative in the budget);
        otherwise plain values via b_αβ = n·∂_αg_β from the position jet.
        """
        if isinstance(self.normal, J.Jet) and self.normal.order == 2:
            dn1 = J.partial(self.normal, 0)
            dn2 = J.partial(self.normal, 1)
            b11 = -J.dot(dn1, self.g1)
            b12 = -J.dot(dn1, self.g2)
            b21 = -J.dot(dn2, self.g1)
            b22 = -J.dot(dn2, self.g2)
            # keep exact symmetry: b is symmetric analytically
            b12 = (b12 + b21) / 2.0
            b = J.stack([J.stack([b11, b12], -1), J.stack([b12, b22], -1)], -2)
        else:
            b = self.b_from_position
        if sabotage.enabled("flip_curvature_sign"):
            return b * (-1.0)
        return b

    @cached_property
    def b_from_position(self):
        """b_αβ = n·∂_αg_β evaluated directly from position second jets
        (plain values; the independent pathway used for cross-checks)."""
        hm = self.pos.hess_matrix()          # (..., 3, 3pairs) -> (...,3,3,3)
        nv = value_of(self.normal)
        return np.einsum("...i,...iab->...ab", nv, hm[..., :2, :2])

    @cached_property
    def b_mix(self):
        """Mixed components b_α^β = g^{βσ} b_{σα}, laid out [α, β]."""
        b, gh = self.b_lo, self.metric_hi
        if isinstance(b, J.Jet):
            rows = []
            for a in (0, 1):
                cols = [J.jsum(gh[..., be, :] * b[..., :, a], axis=-1)
                        for be in (0, 1)]
                rows.append(J.stack(cols, -1))
            return J.stack(rows, -2)
        return np.einsum("...bs,...sa->...ab", value_of(gh), b)

    @cached_property
    def shape_op(self):
        """Shape operator B = b_αβ (g^α ⊗ g^β) as a (..., 3, 3) object."""
        gc1, gc2 = self.g_con
        b = self.b_lo
        gc = (gc1, gc2)
        out = None
        for a in (0, 1):
            for c in (0, 1):
                term = J.outer(gc[a], gc[c]) * b[..., a, c, None, None]
                out = term if out is None else out + term
        return out

    @cached_property
    def kappa(self):
        """Doubled mean curvature κ = tr B = b_α^α."""
        bm = self.b_mix
        return bm[..., 0, 0] + bm[..., 1, 1]

    @cached_property
    def gauss(self):
        """Gaussian curvature K = det(b_α^β)."""
        bm = self.b_mix
        return bm[..., 0, 0] * bm[..., 1, 1] - bm[..., 0, 1] * bm[..., 1, 0]

    # -- Christoffel symbols -------------------------------------------------

    def christoffel(self, pathway: str = "tangents"):
        """Γ^σ_αβ as plain values, laid out [..., σ, α, β].

        pathway="tangents": Γ^σ_αβ = g^σ·∂_α g_β from position second jets.
        pathway="metric":   ½ g^{σγ}(∂_α g_βγ + ∂_β g_αγ − ∂_γ g_αβ) from
        metric first jets.  Independent uses of the jet data — their
        agreement is one of the standing consistency checks.
        """
        if pathway == "tangents":
            hm = self.pos.hess_matrix()[..., :2, :2]   # ∂_a∂_b R_i
            gc = np.stack([value_of(g) for g in self.g_con], axis=-2)
            return np.einsum("...si,...iab->...sab", gc, hm)
        if pathway == "metric":
            dg = self.metric_lo.grad[..., :2]           # ∂_c g_ab -> [...,a,b,c]
            sym = (np.einsum("...bga->...gab", dg)
                   + np.einsum("...agb->...gab", dg)
                   - np.einsum("...abg->...gab", dg))
            return 0.5 * np.einsum("...sg,...gab->...sab",
                                   value_of(self.metric_hi), sym)
        raise ValueError(f"unknown christoffel pathway {pathway!r}")


# ---------------------------------------------------------------------------
# plain-value snapshots
# ---------------------------------------------------------------------------

class Frame(NamedTuple):
    """Value-level first-order frame at a point (batch axes leading)."""

    g_cov: np.ndarray   # (..., 2, 3)
    g_con: np.ndarray   # (..., 2, 3)
    n: np.ndarray       # (..., 3)
    g_lo: np.ndarray    # (..., 2, 2)
    g_hi: np.ndarray    # (..., 2, 2)
    P: np.ndarray       # (..., 3, 3)


class ShapeData(NamedTuple):
    """Value-level curvature data at a point."""

    b_lo: np.ndarray    # (..., 2, 2)
    b_mix: np.ndarray   # (..., 2, 2)  [α, β] = b_α^β
    B: np.ndarray       # (..., 3, 3)
    kappa: np.ndarray
    K: np.ndarray
    gamma: np.ndarray   # (..., 2, 2, 2)  [σ, α, β]


def frame(chart: Chart, xi1, xi2, t=0.0) -> Frame:
    """First-order frame snapshot (see :class:`SurfacePoint` for jets)."""
    sp = SurfacePoint(chart, xi1, xi2, t)
    return frame_of(sp)


def frame_of(sp: SurfacePoint) -> Frame:
    gc1, gc2 = sp.g_con
    return Frame(
        g_cov=np.stack([sp.g1.value, sp.g2.value], axis=-2),
        g_con=np.stack([value_of(gc1), value_of(gc2)], axis=-2),
        n=value_of(sp.normal),
        g_lo=value_of(sp.metric_lo),
        g_hi=value_of(sp.metric_hi),
        P=value_of(sp.projector),
    )


def shape_and_curvature(chart: Chart, xi1, xi2, t=0.0) -> ShapeData:
    """Curvature snapshot; Christoffel symbols via the tangent pathway."""
    sp = SurfacePoint(chart, xi1, xi2, t)
    return ShapeData(
        b_lo=value_of(sp.b_lo),
        b_mix=value_of(sp.b_mix),
        B=value_of(sp.shape_op),
        kappa=value_of(sp.kappa),
        K=value_of(sp.gauss),
        gamma=sp.christoffel("tangents"),
    )
