"""Fields on charts and basis-tagged component representations.

A ``SurfaceField`` is a named evaluator attached to no particular chart: it
receives a :class:`~evosurf.geometry.SurfacePoint` and returns a jet (scalar,
ℝ³ vector, or 3×3 tensor, batch axes leading).  Fields defined in chart
coordinates read the point's parameter jets; fields defined on ambient space
are composed with the position jet — in both cases the derivative frame is
shared with the geometry, so downstream operators never differentiate
numerically.

Component machinery: with g₃ = g³ = n, the covariant/contravariant bases
extend to bases of ℝ³ and any vector or tensor can be tagged

    u = u^i g_i = u_i g^i = û_i ê_i,      u_i = u·g_i,  u^i = u·g^i

(similarly T_ij = g_i·(T g_j) and friends).  Conversions between tags are
exact linear algebra on the frame; mixed tensor components are only defined
for symmetric tensors.  This layer is value-level — representation checks
don't need derivatives.
"""

from __future__ import annotations

import dataclasses
from typing import Callable

import numpy as np

from . import jets as J
from .errors import RepresentationError
from .geometry import SurfacePoint, value_of

__all__ = [
    "SurfaceField", "chart_scalar", "chart_vector", "chart_tensor",
    "ambient_scalar", "ambient_vector", "ambient_tensor",
    "VectorComponents", "TensorComponents",
    "vector_components", "tensor_components", "convert", "reconstruct",
    "trace", "split", "tangential_violation",
]

VECTOR_TAGS = ("cartesian", "covariant", "contravariant")
TENSOR_TAGS = ("cartesian", "covariant", "contravariant", "mixed")


@dataclasses.dataclass(frozen=True)
class SurfaceField:
    """Named field evaluator.

    kind ∈ {"scalar", "vector", "tensor"}; ``fn(sp)`` must be
    jet-polymorphic through the helpers in :mod:`evosurf.jets`.  The
    ``tangential`` flag is a *declaration* — checked lazily at sampled
    points by :func:`tangential_violation`, not proven.
    """

    name: str
    kind: str
    fn: Callable
    tangential: bool = False

    def __call__(self, sp: SurfacePoint):
        return self.fn(sp)


def chart_scalar(name, f, **kw):
    """Field φ̄(ξ¹, ξ², t) given directly in chart coordinates."""
    return SurfaceField(name, "scalar", lambda sp: f(sp.v1, sp.v2, sp.vt), **kw)


def chart_vector(name, f, **kw):
    return SurfaceField(name, "vector", lambda sp: f(sp.v1, sp.v2, sp.vt), **kw)


def chart_tensor(name, f, **kw):
    return SurfaceField(name, "tensor", lambda sp: f(sp.v1, sp.v2, sp.vt), **kw)


def ambient_scalar(name, f, **kw):
    """Field φ(x, t) on ambient space, composed with the chart once."""
    return SurfaceField(name, "scalar", lambda sp: f(sp.pos, sp.vt), **kw)


def ambient_vector(name, f, **kw):
    return SurfaceField(name, "vector", lambda sp: f(sp.pos, sp.vt), **kw)


def ambient_tensor(name, f, **kw):
    return SurfaceField(name, "tensor", lambda sp: f(sp.pos, sp.vt), **kw)


# ---------------------------------------------------------------------------
# tangential/normal splitting
# ---------------------------------------------------------------------------

def split(u, sp: SurfacePoint):
    """u ↦ (u_T, u_N) with u = u_T + u_N n; plain input gives plain output."""
    n = sp.normal
    if not isinstance(u, J.Jet):
        nv = value_of(n)
        u = np.asarray(u, float)
        u_n = (u * nv).sum(-1)
        return u - nv * u_n[..., None], u_n
    u_n = J.dot(u, n)
    return u - n * u_n[..., None], u_n


def tangential_violation(field: SurfaceField, sp: SurfacePoint) -> float:
    """Max normal component of a declared-tangential field at the points.

    Vectors: max |u·n|.  Tensors: max of ‖T n‖ and ‖Tᵀ n‖ (both-sided).
    """
    val = value_of(field(sp))
    n = value_of(sp.normal)
    if field.kind == "vector":
        return float(np.max(np.abs((val * n).sum(-1)), initial=0.0))
    if field.kind == "tensor":
        rn = np.linalg.norm(np.einsum("...ij,...j->...i", val, n), axis=-1)
        ln = np.linalg.norm(np.einsum("...ji,...j->...i", val, n), axis=-1)
        return float(max(np.max(rn, initial=0.0), np.max(ln, initial=0.0)))
    raise ValueError("tangentiality applies to vector/tensor fields")


# ---------------------------------------------------------------------------
# basis-tagged components
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class VectorComponents:
    tag: str
    comps: np.ndarray          # (..., 3)
    frame: SurfacePoint

    def __post_init__(self):
        if self.tag not in VECTOR_TAGS:
            raise RepresentationError(f"unknown vector tag {self.tag!r}")


@dataclasses.dataclass(frozen=True)
class TensorComponents:
    tag: str
    comps: np.ndarray          # (..., 3, 3)
    frame: SurfacePoint

    def __post_init__(self):
        if self.tag not in TENSOR_TAGS:
            raise RepresentationError(f"unknown tensor tag {self.tag!r}")


def _bases(sp: SurfacePoint):
    """(covariant rows g_i, contravariant rows g^i) with g₃ = g³ = n."""
    gc1, gc2 = sp.g_con
    n = value_of(sp.normal)
    cov = np.stack([sp.g1.value, sp.g2.value, n], axis=-2)
    con = np.stack([value_of(gc1), value_of(gc2), n], axis=-2)
    return cov, con


def vector_components(u, sp: SurfacePoint, tag: str) -> VectorComponents:
    """Tag a Cartesian vector: u_i = u·g_i, u^i = u·g^i, û_i = u·ê_i."""
    u = value_of(u)
    cov, con = _bases(sp)
    if tag == "cartesian":
        comps = u
    elif tag == "covariant":
        comps = np.einsum("...i,...ai->...a", u, cov)
    elif tag == "contravariant":
        comps = np.einsum("...i,...ai->...a", u, con)
    else:
        raise RepresentationError(f"unknown vector tag {tag!r}")
    return VectorComponents(tag, comps, sp)


def tensor_components(T, sp: SurfacePoint, tag: str) -> TensorComponents:
    """Tag a Cartesian tensor: T_ij = g_i·(T g_j) and friends.

    The mixed representation T^i_j = g^i·(T g_j) is reserved for symmetric
    tensors (otherwise T^i_j and T_j^i differ and a single table is
    ambiguous) — requesting it for a non-symmetric T raises.
    """
    T = value_of(T)
    cov, con = _bases(sp)
    if tag == "cartesian":
        comps = T
    elif tag == "covariant":
        comps = np.einsum("...ai,...ij,...bj->...ab", cov, T, cov)
    elif tag == "contravariant":
        comps = np.einsum("...ai,...ij,...bj->...ab", con, T, con)
    elif tag == "mixed":
        asym = np.max(np.abs(T - np.swapaxes(T, -1, -2)), initial=0.0)
        scale = np.max(np.abs(T), initial=0.0)
        if asym > 1e-12 * max(1.0, scale):
            raise RepresentationError(
                f"mixed components requested for a non-symmetric tensor "
                f"(asymmetry {asym:.3e})")
        comps = np.einsum("...ai,...ij,...bj->...ab", con, T, cov)
    else:
        raise RepresentationError(f"unknown tensor tag {tag!r}")
    return TensorComponents(tag, comps, sp)


def reconstruct(c):
    """Cartesian representation of tagged components."""
    if isinstance(c, VectorComponents):
        cov, con = _bases(c.frame)
        if c.tag == "cartesian":
            return c.comps
        basis = con if c.tag == "covariant" else cov   # u = u_i g^i = u^i g_i
        return np.einsum("...a,...ai->...i", c.comps, basis)
    if isinstance(c, TensorComponents):
        cov, con = _bases(c.frame)
        if c.tag == "cartesian":
            return c.comps
        if c.tag == "covariant":       # T = T_ab g^a ⊗ g^b
            return np.einsum("...ab,...ai,...bj->...ij", c.comps, con, con)
        if c.tag == "contravariant":   # T = T^ab g_a ⊗ g_b
            return np.einsum("...ab,...ai,...bj->...ij", c.comps, cov, cov)
        # mixed: T = T^a_b g_a ⊗ g^b
        return np.einsum("...ab,...ai,...bj->...ij", c.comps, cov, con)
    raise TypeError("reconstruct expects tagged components")


def convert(c, target: str):
    """Re-tag components; exact (inverse-free frame algebra) round trips."""
    if isinstance(c, VectorComponents):
        return vector_components(reconstruct(c), c.frame, target)
    if isinstance(c, TensorComponents):
        return tensor_components(reconstruct(c), c.frame, target)
    raise TypeError("convert expects tagged components")


def trace(c: TensorComponents):
    """Operator trace computed *within* the representation.

    cartesian/mixed: plain diagonal sum.  covariant: T_ij contracted with
    the inverse frame Gram matrix; contravariant: with the Gram matrix
    itself (block diag(g_αβ, 1) since g₃ = n is unit and orthogonal).
    """
    comps = c.comps
    if c.tag in ("cartesian", "mixed"):
        return np.einsum("...aa->...", comps)
    sp = c.frame
    G = np.zeros(comps.shape[:-2] + (3, 3))
    if c.tag == "covariant":
        G[..., :2, :2] = value_of(sp.metric_hi)
    else:
        G[..., :2, :2] = value_of(sp.metric_lo)
    G[..., 2, 2] = 1.0
    return np.einsum("...ab,...ab->...", comps, G)
