"""Residual evaluators for the surface Navier–Stokes formulations.

Five ways of writing momentum balance on a moving surface are implemented
as *residual* evaluators — plug in a closed-form flow state, get back how
far it is from solving each system.  The formulations are supposed to be
equivalent; the point of this module is that each one is assembled from
*different* machinery, so their numerical agreement on arbitrary states is
a real theorem check rather than the same expression evaluated twice:

``full_4x``
    Momentum for the full velocity, ρv̇ = f − ∇_Γp − pκn + 2μ₀ div_Γ E(v),
    with div_Γ v as the constraint.  Routes: "curvilinear" (exact jets,
    term by term), "components" (everything through the contravariant
    stress table T^{αβ} = −p g^{αβ} + 2μ₀ E^{αβ} and its covariant
    derivatives), "cartesian" (embedded operators: closest-point extension
    plus central differences, O(h²)).

``tangential_split`` / ``tangential_voigt`` / ``tangential_rewritten``
    Three assemblies of the tangential momentum equation.  *split* keeps
    the material rate of v_T plus the normal-rate bookkeeping terms
    ((ṅ·v_T)n + v_N ṅ) with ṅ computed exactly from the time jet, and
    diffuses the strain of the full velocity.  *voigt* reconstructs the
    normal-parametrisation time derivative P∂_t v̄_T from raw jet slots,
    adds (∇_Γv_T)v_T through the Christoffel component table, replaces ṅ
    by the surrogate −(Bv_T + ∇_Γv_N), and pushes E(v_T) − v_N B through
    the component-table divergence.  *rewritten* projects the material
    rate (Pv̇_T), uses the same surrogate on the right-hand side, and the
    definition-pathway divergence of E(v_T) − v_N B.  Their mutual
    agreement exercises every identity the equivalence proof uses.

``normal_split`` / ``normal_miura``
    Scalar normal momentum.  *split* is the n-projection of the full
    system rewritten with v̇_N, the exact ṅ, and the trace formula
    n·div_ΓE = tr(B ∇_Γv_T) − v_N tr B²; *miura* is the unit-density
    normal balance v̇_N = 2μ₀ n·div_ΓE(v) − p¹ + ṅ·v_T with the surrogate
    ṅ and the definition-route viscous term (needs the first-order
    pressure coefficient p¹).

``miura``
    The unit-density system driven by the two-term pressure pair (p, p¹):
    v̇ = −∇_Γp − p¹n + 2μ₀ div_Γ E(v), with both div_Γ v = 0 and the
    prescribed normal speed v·n = V_Γ as constraints.  Asking for it on a
    state without p¹ or V_Γ raises :class:`IncompleteStateError`.

Kinematic admissibility
-----------------------
Material derivatives of surface fields along a state velocity w are chart
derivatives plus *tangential* relative advection: a constant-normal
extension is flat along n, so only P(w − v̄) advects.  That formula — and
with it the ṅ-surrogate identity — describes particles that actually stay
on the evolving surface, which requires w·n to equal the chart's normal
speed.  States built with ``v_N=None`` (the default: v_N := v̄·n) are
admissible by construction; :func:`admissibility_gap` measures the
violation of an explicit v_N.

Sign conventions follow the geometry layer: b_αβ = n·∂_αg_β, so the unit
sphere with outward normal has B = −P and κ = −2.  All residuals are
plain value arrays; norms are discrete (max and RMS over the sampled
points and residual components — no quadrature weighting).
"""

from __future__ import annotations

import dataclasses
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import curv_ops as C
from . import jets as J
from . import sabotage
from .ambient_ops import (
    ExtensionStencil,
    div_hat_tensor_of_transpose,
    div_hat_vector,
    grad_hat_scalar,
    pressure_pair_gradient,
    shape_from_normal,
)
from .errors import ConfigError, IncompleteStateError
from .evolution import material_derivative, material_jet
from .geometry import SurfacePoint, value_of

__all__ = [
    "FlowState", "SystemResidual", "SYSTEM_IDS", "residual",
    "velocity_field", "normal_speed_field", "strain", "tangential_strain",
    "stress", "material_acceleration", "n_rate_exact", "n_rate_surrogate",
    "n_rate_gap",
    "residual_full", "residual_miura", "residual_tangential",
    "residual_normal",
    "admissibility_gap", "strain_splitting_gap",
    "acceleration_splitting_gaps", "normal_viscous_trace_gap",
    "pressure_tensor_gap", "range_form_gaps", "ForceSplit",
    "conservative_dissipative", "component_form_gap",
    "velocity_corrector", "first_corrector", "first_corrector_fd",
    "second_corrector_residual",
    "pressure_pair_target", "miura_full_consistency", "identity_suite",
]

SYSTEM_IDS = (
    "full_4x",
    "miura",
    "tangential_split",
    "tangential_voigt",
    "tangential_rewritten",
    "normal_split",
    "normal_miura",
)


# ---------------------------------------------------------------------------
# flow states
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class FlowState:
    """Closed-form flow data on some chart.

    ``v_T`` and ``p`` are jet-polymorphic evaluators (SurfacePoint → jet);
    ``v_N=None`` takes the chart's own normal speed v̄·n, which keeps the
    state kinematically admissible.  ``p1`` is the first-order coefficient
    of the pressure pair (p, p¹), ``V_Gamma`` the prescribed normal speed
    — both optional, needed only by the miura evaluators.  ``v1`` may
    carry a closed form of the first velocity corrector −P(∇_Sv)n for
    states where it is known analytically.  Forcing defaults to zero.
    """

    name: str
    v_T: Callable
    p: Callable
    v_N: Optional[Callable] = None
    p1: Optional[Callable] = None
    V_Gamma: Optional[Callable] = None
    f_T: Optional[Callable] = None
    f_N: Optional[Callable] = None
    v1: Optional[Callable] = None
    rho: float = 1.0
    mu0: float = 1.0

    def __post_init__(self):
        if not self.rho > 0.0:
            raise ConfigError(f"state {self.name!r}: density must be "
                              f"positive, got {self.rho!r}")
        if not self.mu0 >= 0.0:
            raise ConfigError(f"state {self.name!r}: viscosity must be "
                              f"non-negative, got {self.mu0!r}")


def _eval(f, sp):
    return f(sp) if callable(f) else f


def _as_field(x) -> Callable:
    """Wrap a constant as a batch-shaped field evaluator; pass callables."""
    if callable(x):
        return x

    def const(sp, _c=float(x)):
        return np.full(np.shape(value_of(sp.kappa)), _c)

    return const


def normal_speed_field(state: FlowState) -> Callable:
    """v_N as a jet evaluator (the chart's v̄·n when the state has none)."""
    if state.v_N is not None:
        return state.v_N
    return lambda sp: J.dot(sp.velocity, sp.normal)


def velocity_field(state: FlowState) -> Callable:
    """Full velocity v = v_T + v_N n as a jet evaluator."""
    v_n = normal_speed_field(state)

    def v(sp):
        return _eval(state.v_T, sp) + sp.normal * _eval(v_n, sp)[..., None]

    return v


def _forcing(state: FlowState, sp: SurfacePoint):
    """(f, f_T, f_N) values with zero defaults."""
    n = value_of(sp.normal)
    f_t = (np.zeros(n.shape) if state.f_T is None
           else value_of(_eval(state.f_T, sp)))
    f_n = (np.zeros(n.shape[:-1]) if state.f_N is None
           else value_of(_eval(state.f_N, sp)))
    return f_t + f_n[..., None] * n, f_t, f_n


def admissibility_gap(state: FlowState, sp: SurfacePoint) -> float:
    """max |v_N − v̄·n| — zero means the state rides the chart's surface."""
    vn = value_of(_eval(normal_speed_field(state), sp))
    chart_vn = value_of(J.dot(sp.velocity, sp.normal))
    return float(np.max(np.abs(vn - chart_vn), initial=0.0))


# ---------------------------------------------------------------------------
# strain, stress, kinematic rates
# ---------------------------------------------------------------------------

def strain(u, sp: SurfacePoint):
    """Rate-of-strain operator E(u) = ½(∇_Γu + ∇_Γᵀu) as a (..., 3, 3) jet."""
    g = C.covariant_derivative(u, sp)
    return (g + J.transpose2(g)) * 0.5


def tangential_strain(state: FlowState, sp: SurfacePoint):
    """E(v_T) − v_N B — the split form of E(v) — as a (..., 3, 3) jet."""
    e_t = strain(state.v_T, sp)
    vn = _eval(normal_speed_field(state), sp)
    return e_t - sp.shape_op * vn[..., None, None]


def stress(state: FlowState, sp: SurfacePoint):
    """Surface stress T = −p P + 2μ₀ E(v) as a jet."""
    p = _eval(state.p, sp)
    return (sp.projector * (-1.0 * p)[..., None, None]
            + strain(velocity_field(state), sp) * (2.0 * state.mu0))


def material_acceleration(state: FlowState, sp: SurfacePoint) -> np.ndarray:
    """v̇ — material derivative of the full velocity along itself (values)."""
    v = velocity_field(state)
    return value_of(material_jet(v, sp, w=v))


def n_rate_exact(state: FlowState, sp: SurfacePoint) -> np.ndarray:
    """ṅ along the state's flow, from the time jet plus relative advection."""
    return value_of(material_jet(lambda q: q.normal, sp,
                                 w=velocity_field(state)))


def n_rate_surrogate(state: FlowState, sp: SurfacePoint) -> np.ndarray:
    """ṅ = −(B v_T + ∇_Γv_N) — the curvature/normal-speed surrogate."""
    b = value_of(sp.shape_op)
    vt = value_of(_eval(state.v_T, sp))
    gn = value_of(C.grad_scalar(normal_speed_field(state), sp))
    return -(np.einsum("...ij,...j->...i", b, vt) + gn)


# ---------------------------------------------------------------------------
# system residuals
# ---------------------------------------------------------------------------

class SystemResidual(NamedTuple):
    """Named pointwise residual arrays of one system at a batch of points."""

    system_id: str
    parts: dict

    def pointwise(self) -> np.ndarray:
        """All residual components side by side, shape (..., k)."""
        cols = [a if _is_vector(a) else a[..., None]
                for a in map(np.asarray, self.parts.values())]
        return np.concatenate(cols, axis=-1)

    @property
    def max_norm(self) -> float:
        return float(max((np.max(np.abs(a), initial=0.0)
                          for a in self.parts.values()), default=0.0))

    @property
    def l2_norm(self) -> float:
        flat = np.concatenate([np.ravel(a) for a in self.parts.values()])
        return float(np.sqrt(np.mean(flat ** 2))) if flat.size else 0.0


def _is_vector(a: np.ndarray) -> bool:
    return a.ndim >= 1 and a.shape[-1] == 3


def residual_full(state: FlowState, sp: SurfacePoint,
                  route: str = "curvilinear", *,
                  h: float | None = None, h_t: float = 1e-4) -> dict:
    """ρv̇ − f + ∇_Γp + pκn − 2μ₀ div_ΓE(v) and div_Γv, as value arrays."""
    v = velocity_field(state)
    f, _, _ = _forcing(state, sp)
    n = value_of(sp.normal)
    p = value_of(_eval(state.p, sp))

    if route == "curvilinear":
        acc = material_acceleration(state, sp)
        gp = value_of(C.grad_scalar(state.p, sp))
        visc = C.div_tensor(lambda q: strain(v, q), sp, "definition")
        mom = state.rho * acc - f + gp - 2.0 * state.mu0 * visc
        if not sabotage.enabled("drop_pressure_curvature"):
            mom = mom + (p * value_of(sp.kappa))[..., None] * n
        cont = C.div_vector(v, sp, "definition")
    elif route == "components":
        acc = material_acceleration(state, sp)
        mom = (state.rho * acc - f
               - C.div_tensor(lambda q: stress(state, q), sp, "components"))
        cont = (C.div_vector(state.v_T, sp, "components")
                - value_of(_eval(normal_speed_field(state), sp))
                * value_of(sp.kappa))
    elif route == "cartesian":
        st = ExtensionStencil(sp.chart, sp.params, float(sp.t), h, center=sp)
        acc = material_derivative(v, sp, "cartesian", w=v, h=h, h_t=h_t)
        gp = grad_hat_scalar(state.p, st)
        kap = np.einsum("...ii->...", shape_from_normal(st))
        visc = div_hat_tensor_of_transpose(lambda q: strain(v, q), st)
        mom = (state.rho * acc - f + gp + (p * kap)[..., None] * n
               - 2.0 * state.mu0 * visc)
        cont = div_hat_vector(v, st)
    else:
        raise ValueError(f"unknown full-system route {route!r}")
    return {"momentum": mom, "continuity": cont}


def residual_miura(state: FlowState, sp: SurfacePoint) -> dict:
    """Unit-density pressure-pair system: momentum, div_Γv, v·n − V_Γ."""
    if state.p1 is None or state.V_Gamma is None:
        missing = [name for name, val in
                   (("p1", state.p1), ("V_Gamma", state.V_Gamma))
                   if val is None]
        raise IncompleteStateError(
            f"state {state.name!r} lacks {' and '.join(missing)}; the "
            "pressure-pair system needs both")
    v = velocity_field(state)
    n = value_of(sp.normal)
    acc = material_acceleration(state, sp)
    gp = value_of(C.grad_scalar(state.p, sp))
    p1 = value_of(_eval(state.p1, sp))
    visc = C.div_tensor(lambda q: strain(v, q), sp, "definition")
    mom = acc + gp + p1[..., None] * n - 2.0 * state.mu0 * visc
    cont = C.div_vector(v, sp, "definition")
    vn = value_of(J.dot(v(sp), sp.normal))
    speed = vn - value_of(_eval(state.V_Gamma, sp))
    return {"momentum": mom, "continuity": cont, "normal_speed": speed}


def residual_tangential(state: FlowState, sp: SurfacePoint,
                        form: str = "split") -> dict:
    """Tangential momentum residual in one of the three equivalent forms."""
    v = velocity_field(state)
    vn_field = normal_speed_field(state)
    vt = value_of(_eval(state.v_T, sp))
    vn = value_of(_eval(vn_field, sp))
    n = value_of(sp.normal)
    P = value_of(sp.projector)
    kap = value_of(sp.kappa)
    gp = value_of(C.grad_scalar(state.p, sp))
    rho, mu0 = state.rho, state.mu0

    if form == "split":
        vt_dot = value_of(material_jet(state.v_T, sp, w=v))
        ndot = n_rate_exact(state, sp)
        visc = np.einsum("...ij,...j->...i", P,
                         C.div_tensor(lambda q: strain(v, q), sp,
                                      "definition"))
        _, f_t, _ = _forcing(state, sp)
        mom = (rho * (vt_dot
                      + np.einsum("...i,...i->...", ndot, vt)[..., None] * n
                      + vn[..., None] * ndot)
               - f_t + gp - 2.0 * mu0 * visc)
        cont = C.div_vector(state.v_T, sp, "definition") - vn * kap
    elif form == "voigt":
        # P ∂_t v̄_T along the normal parametrisation: raw time slot minus
        # raw advection by the chart velocity (the extension is flat
        # along n, so the normal-speed transport term drops).
        u = _eval(state.v_T, sp)
        t_slot = value_of(J.partial(u, 2))
        vbar = sp.velocity
        gc1, gc2 = sp.g_con
        a = np.stack([value_of(J.dot(vbar, gc1)),
                      value_of(J.dot(vbar, gc2))], axis=-1)
        raw = (t_slot
               - a[..., 0, None] * value_of(J.partial(u, 0))
               - a[..., 1, None] * value_of(J.partial(u, 1)))
        drift = np.einsum("...ij,...j->...i", P, raw)
        # (∇_Γ v_T) v_T through the Christoffel table
        cd = C.component_derivatives(state.v_T, sp)
        adv_cov = np.einsum("...b,...ab->...a", cd.u_con, cd.u_cov_bar)
        gcon = np.stack([value_of(gc1), value_of(gc2)], axis=-2)
        adv = np.einsum("...a,...ai->...i", adv_cov, gcon)
        push = -n_rate_surrogate(state, sp)          # B v_T + ∇_Γ v_N
        visc = np.einsum("...ij,...j->...i", P,
                         C.div_tensor(lambda q: tangential_strain(state, q),
                                      sp, "components"))
        mom = (rho * (drift + adv - vn[..., None] * push)
               + gp - 2.0 * mu0 * visc)
        cont = C.div_vector(state.v_T, sp, "components") - vn * kap
    elif form == "rewritten":
        vt_dot = value_of(material_jet(state.v_T, sp, w=v))
        push = -n_rate_surrogate(state, sp)
        visc = np.einsum("...ij,...j->...i", P,
                         C.div_tensor(lambda q: tangential_strain(state, q),
                                      sp, "definition"))
        mom = (rho * (np.einsum("...ij,...j->...i", P, vt_dot)
                      - vn[..., None] * push)
               + gp - 2.0 * mu0 * visc)
        # div_Γv_T − v_Nκ = tr E(v_T) − v_N tr B = tr(E(v_T) − v_N B)
        cont = np.einsum("...ii->...", value_of(tangential_strain(state, sp)))
    else:
        raise ValueError(f"unknown tangential form {form!r}")
    return {"momentum": mom, "continuity": cont}


def residual_normal(state: FlowState, sp: SurfacePoint,
                    variant: str = "split") -> dict:
    """Normal momentum residual (scalar part array)."""
    v = velocity_field(state)
    vn_field = normal_speed_field(state)
    vt = value_of(_eval(state.v_T, sp))
    vn = value_of(_eval(vn_field, sp))
    kap = value_of(sp.kappa)
    b = value_of(sp.shape_op)
    p = value_of(_eval(state.p, sp))
    mu0 = state.mu0
    vn_dot = value_of(material_jet(vn_field, sp, w=v))

    if variant == "split":
        ndot = n_rate_exact(state, sp)
        gvt = value_of(C.covariant_derivative(state.v_T, sp))
        tr_bg = np.einsum("...ij,...ji->...", b, gvt)
        tr_b2 = np.einsum("...ij,...ji->...", b, b)
        _, _, f_n = _forcing(state, sp)
        mom = (state.rho * (vn_dot - np.einsum("...i,...i->...", ndot, vt))
               - f_n + p * kap - 2.0 * mu0 * (tr_bg - vn * tr_b2))
    elif variant == "miura":
        if state.p1 is None:
            raise IncompleteStateError(
                f"state {state.name!r} lacks p1; the normal pressure-pair "
                "balance needs the first-order coefficient")
        p1 = value_of(_eval(state.p1, sp))
        ndot = n_rate_surrogate(state, sp)
        dive = C.div_tensor(lambda q: strain(v, q), sp, "definition")
        n = value_of(sp.normal)
        mom = (vn_dot
               - 2.0 * mu0 * np.einsum("...i,...i->...", n, dive)
               + p1 - np.einsum("...i,...i->...", ndot, vt))
    else:
        raise ValueError(f"unknown normal variant {variant!r}")
    return {"momentum": mom}


def residual(system_id: str, state: FlowState, sp: SurfacePoint,
             **kw) -> SystemResidual:
    """Dispatch on the system id; returns named parts with norm helpers."""
    if system_id == "full_4x":
        parts = residual_full(state, sp, **kw)
    elif system_id == "miura":
        parts = residual_miura(state, sp, **kw)
    elif system_id.startswith("tangential_"):
        parts = residual_tangential(state, sp,
                                    form=system_id.removeprefix("tangential_"),
                                    **kw)
    elif system_id.startswith("normal_"):
        parts = residual_normal(
            state, sp, variant=system_id.removeprefix("normal_"), **kw)
    else:
        raise ValueError(
            f"unknown system {system_id!r}; expected one of {SYSTEM_IDS}")
    return SystemResidual(system_id, parts)


# ---------------------------------------------------------------------------
# identity gaps (the equivalence proof, term by term)
# ---------------------------------------------------------------------------

def strain_splitting_gap(state: FlowState, sp: SurfacePoint) -> float:
    """max ‖E(v) − (E(v_T) − v_N B)‖ over the batch."""
    e_full = value_of(strain(velocity_field(state), sp))
    e_split = value_of(tangential_strain(state, sp))
    return float(np.max(np.abs(e_full - e_split), initial=0.0))


def acceleration_splitting_gaps(state: FlowState, sp: SurfacePoint) -> dict:
    """The three acceleration-splitting identities (max gaps).

    ``pv``:  Pv̇   = v̇_T + (ṅ·v_T)n + v_N ṅ
    ``vn``:  v̇·n  = v̇_N − v_T·ṅ
    ``vt``:  v̇_T  = Pv̇_T − (ṅ·v_T)n
    """
    v = velocity_field(state)
    P = value_of(sp.projector)
    n = value_of(sp.normal)
    vt = value_of(_eval(state.v_T, sp))
    vn = value_of(_eval(normal_speed_field(state), sp))
    acc = material_acceleration(state, sp)
    vt_dot = value_of(material_jet(state.v_T, sp, w=v))
    vn_dot = value_of(material_jet(normal_speed_field(state), sp, w=v))
    ndot = n_rate_exact(state, sp)
    nv = np.einsum("...i,...i->...", ndot, vt)

    pv = np.einsum("...ij,...j->...i", P, acc) - (
        vt_dot + nv[..., None] * n + vn[..., None] * ndot)
    vndot = np.einsum("...i,...i->...", acc, n) - (vn_dot - nv)
    vtid = vt_dot - (np.einsum("...ij,...j->...i", P, vt_dot)
                     - nv[..., None] * n)
    return {
        "pv": float(np.max(np.abs(pv), initial=0.0)),
        "vn": float(np.max(np.abs(vndot), initial=0.0)),
        "vt": float(np.max(np.abs(vtid), initial=0.0)),
    }


def normal_viscous_trace_gap(state: FlowState, sp: SurfacePoint) -> float:
    """|n·div_ΓE(v) − (tr(B∇_Γv_T) − v_N tr B²)| (max over batch)."""
    v = velocity_field(state)
    n = value_of(sp.normal)
    b = value_of(sp.shape_op)
    vn = value_of(_eval(normal_speed_field(state), sp))
    lhs = np.einsum("...i,...i->...", n,
                    C.div_tensor(lambda q: strain(v, q), sp, "definition"))
    gvt = value_of(C.covariant_derivative(state.v_T, sp))
    rhs = (np.einsum("...ij,...ji->...", b, gvt)
           - vn * np.einsum("...ij,...ji->...", b, b))
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def pressure_tensor_gap(p_field, sp: SurfacePoint) -> float:
    """max ‖div_Γ(pP) − (∇_Γp + pκn)‖ — the pressure/curvature identity."""
    lhs = C.div_tensor(
        lambda q: q.projector * _eval(p_field, q)[..., None, None],
        sp, "definition")
    rhs = (value_of(C.grad_scalar(p_field, sp))
           + (value_of(_eval(p_field, sp)) * value_of(sp.kappa))[..., None]
           * value_of(sp.normal))
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def range_form_gaps(p_field, sp: SurfacePoint) -> tuple[float, float]:
    """Split div_Γ(pP) into (tangential, normal) parts and compare with
    (∇_Γp, pκ): returns the two max gaps."""
    g = C.div_tensor(
        lambda q: q.projector * _eval(p_field, q)[..., None, None],
        sp, "definition")
    P = value_of(sp.projector)
    n = value_of(sp.normal)
    tan = np.einsum("...ij,...j->...i", P, g) - value_of(
        C.grad_scalar(p_field, sp))
    nor = (np.einsum("...i,...i->...", g, n)
           - value_of(_eval(p_field, sp)) * value_of(sp.kappa))
    return (float(np.max(np.abs(tan), initial=0.0)),
            float(np.max(np.abs(nor), initial=0.0)))


class ForceSplit(NamedTuple):
    conservative: np.ndarray   # −ρ v̇
    dissipative: np.ndarray    # 2μ₀ div_Γ E(v)
    pressure_range: np.ndarray  # ∇_Γp + pκn
    closure_gap: float         # ‖F_cons + F_diss + f − (∇_Γp + pκn)‖_max


def conservative_dissipative(state: FlowState, sp: SurfacePoint) -> ForceSplit:
    """Conservative/dissipative force split of the zero-forcing system.

    For an exact solution with f ≡ 0 the conservative and dissipative
    forces add up to the pressure range form; a nonzero forcing shifts the
    balance by exactly −f, so the closure gap also vanishes on forced
    manufactured states.
    """
    v = velocity_field(state)
    f, _, _ = _forcing(state, sp)
    cons = -state.rho * material_acceleration(state, sp)
    diss = 2.0 * state.mu0 * C.div_tensor(lambda q: strain(v, q), sp,
                                          "definition")
    p = value_of(_eval(state.p, sp))
    rng = (value_of(C.grad_scalar(state.p, sp))
           + (p * value_of(sp.kappa))[..., None] * value_of(sp.normal))
    gap = float(np.max(np.abs(cons + diss + f - rng), initial=0.0))
    return ForceSplit(cons, diss, rng, gap)


def component_form_gap(state: FlowState, sp: SurfacePoint) -> float:
    """Full-system residual: invariant route vs. stress-component route."""
    a = residual_full(state, sp, "curvilinear")
    b = residual_full(state, sp, "components")
    gaps = [np.max(np.abs(a[k] - b[k]), initial=0.0) for k in a]
    return float(max(gaps))


# ---------------------------------------------------------------------------
# thin-layer velocity/pressure expansion coefficients
# ---------------------------------------------------------------------------

def velocity_corrector(v, sp: SurfacePoint):
    """−P(∇_Sv)n = −Σ_α g^α (∂_αv·n) for a velocity evaluator v, as a jet.

    The first coefficient of the thin-layer velocity expansion; it is
    tangential by construction.
    """
    f = _eval(v, sp)
    n = sp.normal
    gc1, gc2 = sp.g_con
    out = None
    for gc, k in ((gc1, 0), (gc2, 1)):
        term = gc * J.dot(J.partial(f, k), n)[..., None] * (-1.0)
        out = term if out is None else out + term
    return out


def first_corrector(state: FlowState, sp: SurfacePoint) -> np.ndarray:
    """v¹ = −P(∇_Sv)n for the state's full velocity (values)."""
    return value_of(velocity_corrector(velocity_field(state), sp))


def first_corrector_fd(state: FlowState, sp: SurfacePoint,
                       h: float | None = None) -> np.ndarray:
    """v¹ = −(∇̂vᵉ)ᵀ n through the closest-point extension (values, O(h²))."""
    st = ExtensionStencil(sp.chart, sp.params, float(sp.t), h, center=sp)
    jac = st.gradient(velocity_field(state))
    n = value_of(sp.normal)
    return -np.einsum("...ij,...i->...j", jac, n)


def second_corrector_residual(state: FlowState, sp: SurfacePoint,
                              h: float | None = None,
                              route: str = "fd") -> float:
    """max ‖½(B G(v) + G(v¹)) n‖ — the second velocity corrector vanishes.

    G(u) = P∇_Su is evaluated as the transpose of the ambient Jacobian of
    the constant-normal extension (route="fd"); route="exact" uses the
    state's closed-form ``v1`` (required) and exact jets throughout.
    """
    b = value_of(sp.shape_op)
    n = value_of(sp.normal)
    if route == "exact":
        if state.v1 is None:
            raise IncompleteStateError(
                f"state {state.name!r} has no closed-form first corrector; "
                "use the finite-difference route")
        gv = value_of(C.full_gradient(velocity_field(state), sp))
        gv1 = value_of(C.full_gradient(state.v1, sp))
    elif route == "fd":
        st = ExtensionStencil(sp.chart, sp.params, float(sp.t), h, center=sp)
        gv = np.swapaxes(st.gradient(velocity_field(state)), -1, -2)
        gv1 = np.swapaxes(
            st.gradient(lambda q: first_corrector(state, q)), -1, -2)
    else:
        raise ValueError(f"unknown route {route!r}")
    resid = 0.5 * np.einsum(
        "...ij,...j->...i",
        np.einsum("...ij,...jk->...ik", b, gv) + gv1, n)
    return float(np.max(np.abs(resid), initial=0.0))


def pressure_pair_target(state: FlowState, sp: SurfacePoint) -> np.ndarray:
    """∇_Γp + p¹n — the surface limit of the pressure-pair gradient."""
    if state.p1 is None:
        raise IncompleteStateError(
            f"state {state.name!r} lacks p1; the pressure pair is undefined")
    return (value_of(C.grad_scalar(state.p, sp))
            + value_of(_eval(state.p1, sp))[..., None]
            * value_of(sp.normal))


def n_rate_gap(state: FlowState, sp: SurfacePoint) -> float:
    """max ‖ṅ_exact − ṅ_surrogate‖ — vanishes for admissible states."""
    return float(np.max(np.abs(n_rate_exact(state, sp)
                               - n_rate_surrogate(state, sp)), initial=0.0))


def miura_full_consistency(state: FlowState, sp: SurfacePoint) -> float:
    """Momentum gap between the pressure-pair system with p¹ := pκ − f_N
    and the full system — the substitution that trades −pκn − f_Nn for
    −p¹n.  Exact at unit density with no tangential forcing, so both
    sides are evaluated with ρ = 1, f_T = 0."""
    f_n = _as_field(0.0 if state.f_N is None else state.f_N)

    def p1(q, _p=state.p, _f=f_n):
        return value_of(_eval(_p, q)) * value_of(q.kappa) - value_of(_f(q))

    base = dataclasses.replace(state, rho=1.0, f_T=None)
    probe = dataclasses.replace(base, p1=p1, V_Gamma=_as_field(0.0))
    mi = residual_miura(probe, sp)["momentum"]
    fu = residual_full(base, sp, "curvilinear")["momentum"]
    return float(np.max(np.abs(mi - fu), initial=0.0))


def identity_suite(state: FlowState, sp: SurfacePoint, *,
                   h: float | None = None) -> dict:
    """Max pointwise residual of every standalone identity, by name.

    The names are stable — the verification suite surfaces them — and
    each one isolates one step of the equivalence chain between the five
    formulations: the acceleration and strain splittings, the ṅ
    surrogate, the trace formula for the normal viscous force, the
    pressure/curvature tensor identity and its range split, the
    conservative/dissipative closure, the stress-component route, the
    thin-layer velocity correctors, and (when the state carries p¹) the
    two-term pressure expansion probed by ambient finite differences.
    """
    gaps = {}
    acc = acceleration_splitting_gaps(state, sp)
    gaps["acceleration-tangential-split"] = acc["pv"]
    gaps["acceleration-normal-split"] = acc["vn"]
    gaps["tangential-rate-projection"] = acc["vt"]
    gaps["normal-rate-surrogate"] = n_rate_gap(state, sp)
    gaps["strain-splitting"] = strain_splitting_gap(state, sp)
    gaps["normal-viscous-trace"] = normal_viscous_trace_gap(state, sp)
    gaps["pressure-curvature-tensor"] = pressure_tensor_gap(state.p, sp)
    tan, nor = range_form_gaps(state.p, sp)
    gaps["pressure-range-tangential"] = tan
    gaps["pressure-range-normal"] = nor
    gaps["force-closure"] = conservative_dissipative(state, sp).closure_gap
    gaps["stress-component-route"] = component_form_gap(state, sp)
    gaps["admissibility"] = admissibility_gap(state, sp)
    gaps["miura-full-consistency"] = miura_full_consistency(state, sp)

    exact = first_corrector(state, sp)
    fd = first_corrector_fd(state, sp, h=h)
    gaps["first-corrector-routes"] = float(
        np.max(np.abs(exact - fd), initial=0.0))
    if state.v1 is not None:
        gaps["first-corrector-closed-form"] = float(np.max(
            np.abs(exact - value_of(_eval(state.v1, sp))), initial=0.0))
    gaps["second-corrector"] = second_corrector_residual(state, sp, h=h)

    st = ExtensionStencil(sp.chart, sp.params, float(sp.t), h, center=sp)
    ghat = grad_hat_scalar(state.p, st)
    gcurv = value_of(C.grad_scalar(state.p, sp))
    gaps["composite-scalar-gradient"] = float(
        np.max(np.abs(ghat - gcurv), initial=0.0))
    if state.p1 is not None:
        pair = pressure_pair_gradient(_as_field(state.p),
                                      _as_field(state.p1), st)
        gaps["pressure-pair-expansion"] = float(np.max(
            np.abs(pair - pressure_pair_target(state, sp)), initial=0.0))
    return gaps
