"""Surface operators in curvilinear coordinates (the chart-based family).

With g_α = ∂_αR, the dual basis g^α, the normal n and the projector
P = I − n⊗n, the operators are

    ∇_Γφ   = ∂_αφ g^α                       (surface gradient, tangential)
    ∇_αu   = P ∂_αu                          (projected directional derivative)
    ∇_Γu   = ∇_αu ⊗ g^α                      (covariant derivative, 3×3)
    ∇_Su   = g^α ⊗ ∂_αu                      (full surface gradient, no P)
    div_Γu = ∇_αu·g^α = tr(∇_Γu)
    div_ΓT = (∂_αT)ᵀ g^α                     (mind the transpose)

and the operator identity ∇_Γu = P ∇_Sᵀu ties the two gradient flavours
together.

Every operator also has a *component-formula* pathway that rebuilds the
same object from covariant/contravariant components and Christoffel
symbols — e.g. the partial-derivative representation

    ∂_αu = (u_{β|α} − b_{αβ}u₃) g^β + (u_{3|α} + b_α^β u_β) n,

with u_{β|α} = ∂_αu_β − Γ^γ_{αβ}u_γ, and the tensor-divergence formula

    div_ΓT = T^{αβ}_{~|α} g_β + T^{αβ} b_{αβ} n        (T tangential-range).

The two pathways share nothing but the chart jets, so the classical
component identities run as executable cross-checks of the direct route
rather than as trusted code.

Gradient-flavoured operators return jets whenever their inputs allow one
more exact derivative (needed for nested divergences of stress tensors);
divergence-flavoured operators and all component formulas return plain
values.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import jets as J
from .errors import RepresentationError
from .fields import SurfaceField
from .geometry import SurfacePoint, value_of

__all__ = [
    "grad_scalar", "partial_vector", "covariant_derivative", "full_gradient",
    "div_vector", "div_tensor", "ComponentDerivatives", "component_derivatives",
    "tensor_component_derivatives",
]


def _eval(f, sp: SurfacePoint):
    # Accept a SurfaceField, any callable of the point, or an
    # already-evaluated jet/array.
    return f(sp) if callable(f) else f


def grad_scalar(phi, sp: SurfacePoint):
    """∇_Γφ = ∂_αφ g^α — tangential by construction; jet-valued."""
    f = _eval(phi, sp)
    gc1, gc2 = sp.g_con
    d0, d1 = J.partial(f, 0), J.partial(f, 1)
    return gc1 * d0[..., None] + gc2 * d1[..., None]


def partial_vector(u, sp: SurfacePoint, alpha: int, pathway: str = "direct"):
    """∂_αu of a vector field along chart direction α ∈ {0, 1}.

    pathway="direct" differentiates the Cartesian components of ū(ξ,t) in
    the jet frame (returns a jet when u had order 2).  pathway="components"
    evaluates the frame representation

        (u_{β|α} − b_{αβ}u₃) g^β + (u_{3|α} + b_α^β u_β) n

    from covariant components and Christoffel symbols (plain values).
    """
    f = _eval(u, sp)
    if pathway == "direct":
        return J.partial(f, alpha)
    if pathway != "components":
        raise ValueError(f"unknown pathway {pathway!r}")
    cd = component_derivatives(f, sp)
    b = value_of(sp.b_lo)
    bm = value_of(sp.b_mix)                     # [α, β] = b_α^β
    gc = [value_of(g) for g in sp.g_con]
    n = value_of(sp.normal)
    u_cov = cd.u_cov                            # u_β
    out = 0.0
    for be in (0, 1):
        coef = cd.u_cov_bar[..., be, alpha] - b[..., alpha, be] * cd.u_n
        out = out + coef[..., None] * gc[be]
    normal_coef = cd.u_n_bar[..., alpha] + np.einsum(
        "...b,...b->...", bm[..., alpha, :], u_cov)
    return out + normal_coef[..., None] * n


def covariant_derivative(u, sp: SurfacePoint):
    """∇_Γu = (P∂_αu) ⊗ g^α as a (..., 3, 3) jet.

    Maps into the tangent bundle on the left; for tangential u its
    covariant components are the classical u_{β|α}.
    """
    f = _eval(u, sp)
    P = sp.projector
    gc = sp.g_con
    out = None
    for a in (0, 1):
        da = J.matvec(P, J.partial(f, a))
        term = J.outer(da, gc[a])
        out = term if out is None else out + term
    return out


def full_gradient(u, sp: SurfacePoint):
    """∇_Su = g^α ⊗ ∂_αu (unprojected); satisfies ∇_Γu = P ∇_Sᵀu."""
    f = _eval(u, sp)
    gc = sp.g_con
    out = None
    for a in (0, 1):
        term = J.outer(gc[a], J.partial(f, a))
        out = term if out is None else out + term
    return out


def div_vector(u, sp: SurfacePoint, pathway: str = "definition"):
    """div_Γu = ∇_αu·g^α (plain values).

    pathway="components" evaluates u^α_{~|α} = ∂_αu^α + Γ^α_{ασ}u^σ — the
    contravariant-component formula, valid for *tangential* fields (checked
    against ‖u·n‖ ≤ 1e−10).
    """
    f = _eval(u, sp)
    if pathway == "definition":
        gc = [value_of(g) for g in sp.g_con]
        out = 0.0
        for a in (0, 1):
            da = value_of(J.partial(f, a))
            out = out + (da * gc[a]).sum(-1)
        return out
    if pathway != "components":
        raise ValueError(f"unknown pathway {pathway!r}")
    un = np.abs((value_of(f) * value_of(sp.normal)).sum(-1))
    if np.max(un, initial=0.0) > 1e-10:
        raise RepresentationError(
            "contravariant divergence formula requires a tangential field "
            f"(max |u·n| = {float(np.max(un)):.3e})")
    cd = component_derivatives(f, sp)
    return np.einsum("...aa->...", cd.u_con_bar)


def div_tensor(T, sp: SurfacePoint, pathway: str = "definition"):
    """div_ΓT = (∂_αT)ᵀ g^α (plain values, shape (..., 3)).

    pathway="components" evaluates the local representation
    T^{αβ}_{~|α} g_β + T^{αβ} b_{αβ} n, which presumes T maps the tangent
    bundle to itself (T = PTP within 1e−10, checked).
    """
    f = _eval(T, sp)
    if pathway == "definition":
        gc = [value_of(g) for g in sp.g_con]
        out = 0.0
        for a in (0, 1):
            da = value_of(J.partial(f, a))
            out = out + np.einsum("...ji,...j->...i", da, gc[a])
        return out
    if pathway != "components":
        raise ValueError(f"unknown pathway {pathway!r}")
    Tv = value_of(f)
    Pv = value_of(sp.projector)
    PTP = np.einsum("...ij,...jk,...kl->...il", Pv, Tv, Pv)
    gap = np.max(np.abs(Tv - PTP), initial=0.0)
    if gap > 1e-10 * max(1.0, float(np.max(np.abs(Tv), initial=0.0))):
        raise RepresentationError(
            "tensor-divergence component formula requires a tangential-range "
            f"tensor (‖T − PTP‖ = {gap:.3e})")
    Thi, Thi_bar = tensor_component_derivatives(f, sp, variance="contravariant")
    b = value_of(sp.b_lo)
    g_cov = np.stack([sp.g1.value, sp.g2.value], axis=-2)
    tangential = np.einsum("...aba,...bi->...i", Thi_bar, g_cov)
    normal = np.einsum("...ab,...ab->...", Thi, b)
    return tangential + normal[..., None] * value_of(sp.normal)


class ComponentDerivatives(NamedTuple):
    """Covariant machinery of a vector field at a point (plain values)."""

    u_cov: np.ndarray       # u_β = u·g_β               (..., 2)
    u_con: np.ndarray       # u^β = u·g^β               (..., 2)
    u_n: np.ndarray         # u₃ = u·n                  (...)
    u_cov_bar: np.ndarray   # u_{β|α} = ∂_αu_β − Γ^γ_{αβ}u_γ   [β, α]
    u_con_bar: np.ndarray   # u^β_{~|α} = ∂_αu^β + Γ^β_{αγ}u^γ [β, α]
    u_n_bar: np.ndarray     # u_{3|α} = ∂_αu₃           (..., 2)


def component_derivatives(u, sp: SurfacePoint) -> ComponentDerivatives:
    f = _eval(u, sp)
    gamma = sp.christoffel("tangents")
    u_cov_j = J.stack([J.dot(f, sp.g1), J.dot(f, sp.g2)], -1)
    gc1, gc2 = sp.g_con
    u_con_j = J.stack([J.dot(f, gc1), J.dot(f, gc2)], -1)
    u_n_j = J.dot(f, sp.normal)
    du_cov = u_cov_j.grad[..., :2] if isinstance(u_cov_j, J.Jet) else None
    if du_cov is None:
        raise ValueError("component derivatives need a jet-evaluable field")
    du_con = u_con_j.grad[..., :2]
    u_cov = u_cov_j.value
    u_con = u_con_j.value
    # u_{β|α} = ∂_α u_β − Γ^γ_{αβ} u_γ ; u^β_{~|α} = ∂_α u^β + Γ^β_{αγ} u^γ
    u_cov_bar = (np.einsum("...ba->...ba", du_cov)
                 - np.einsum("...gab,...g->...ba", gamma, u_cov))
    u_con_bar = (np.einsum("...ba->...ba", du_con)
                 + np.einsum("...bag,...g->...ba", gamma, u_con))
    u_n_bar = (u_n_j.grad[..., :2] if isinstance(u_n_j, J.Jet)
               else np.zeros(u_cov.shape[:-1] + (2,)))
    return ComponentDerivatives(u_cov, u_con, value_of(u_n_j),
                                u_cov_bar, u_con_bar, u_n_bar)


def tensor_component_derivatives(T, sp: SurfacePoint, variance: str = "covariant"):
    """Surface components of T and their covariant derivatives.

    variance="covariant":      T_αβ = g_α·(T g_β) and
        T_{αβ|γ} = ∂_γT_{αβ} − Γ^σ_{γα}T_{σβ} − Γ^σ_{γβ}T_{ασ}
    variance="contravariant":  T^αβ = g^α·(T g^β) and
        T^{αβ}_{~|γ} = ∂_γT^{αβ} + Γ^α_{γσ}T^{σβ} + Γ^β_{γσ}T^{ασ}

    Returns (components (..., 2, 2), derivatives (..., 2, 2, 2) with the
    derivative index last: [α, β, γ]).
    """
    f = _eval(T, sp)
    gamma = sp.christoffel("tangents")
    basis = (sp.g1, sp.g2) if variance == "covariant" else sp.g_con
    if variance not in ("covariant", "contravariant"):
        raise ValueError(f"unknown variance {variance!r}")
    rows = []
    for a in (0, 1):
        cols = [J.dot(basis[a], J.matvec(f, basis[b])) for b in (0, 1)]
        rows.append(J.stack(cols, -1))
    comp_j = J.stack(rows, -2)
    comp = comp_j.value
    dcomp = comp_j.grad[..., :2]              # [α, β, γ]
    if variance == "covariant":
        corr = (np.einsum("...sga,...sb->...abg", gamma, comp)
                + np.einsum("...sgb,...as->...abg", gamma, comp))
        return comp, dcomp - corr
    corr = (np.einsum("...ags,...sb->...abg", gamma, comp)
            + np.einsum("...bgs,...as->...abg", gamma, comp))
    return comp, dcomp + corr
