"""The named verification checks.

Each check is a pure function from a :class:`CheckContext` to one
:class:`CheckResult`: it draws its own sample points from a PRNG seeded by
(config seed, check id), evaluates one identity or convergence study, and
reports the worst residual against its tolerance.  Checks never share
state, so the runner may execute them in any order or concurrently without
changing a single reported byte.

Two result conventions beyond plain residual-vs-tolerance:

* convergence checks carry a fitted log-log ``slope`` and pass only when
  the slope sits inside its stated band *and* the recorded residual is
  under tolerance;
* witness checks (negative controls) pass when a deliberately wrong
  pathway produces a LARGE gap — ``passed`` is authoritative, while
  ``max_residual`` still records the honest (correct-pathway) number.

Tolerances named here are defaults; a config may override any of them per
check id or per anchor (the family slug shared by related checks).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import partial
from typing import Callable, NamedTuple, Optional

import numpy as np

from .. import ambient_ops as A
from .. import curv_ops as C
from .. import evolution as ev
from .. import jets as J
from .. import navier_stokes as ns
from .. import thin_film as tf
from ..charts import closest_point, interior_samples
from ..fields import SurfaceField
from ..geometry import SurfacePoint, value_of
from . import catalog
from .config import SuiteConfig

__all__ = ["CheckResult", "CheckContext", "Check", "build_checks", "ANCHORS"]

# sample sizes: comparison and thin-film counts are pinned by the
# acceptance contract, the rest balance coverage against the runtime budget
N_COMPARE = 200
N_THIN = 500
N_STATE = 160
N_GEN = 200
N_MAT = 60

ANCHORS = (
    "surface-vs-ambient-comparison",
    "component-formulas",
    "rate-of-strain",
    "material-derivative",
    "material-trajectories",
    "transport-theorem",
    "tangential-system-equivalence",
    "manufactured-states",
    "operator-identities",
    "thin-film-structure",
    "flat-extension-expansion",
    "surface-quadrature",
    "frame-and-curvature",
    "reporting",
)


@dataclass(frozen=True)
class CheckResult:
    id: str
    anchor: str
    max_residual: float
    tol: float
    passed: bool
    slope: Optional[float] = None
    note: str = ""

    def to_schema(self) -> dict:
        out = {
            "id": self.id,
            "anchor": self.anchor,
            "max_residual": float(self.max_residual),
            "tol": float(self.tol),
            "pass": bool(self.passed),
        }
        if self.slope is not None:
            out["slope"] = float(self.slope)
        return out


@dataclass(frozen=True)
class CheckContext:
    config: SuiteConfig

    def rng(self, check_id: str) -> np.random.Generator:
        """Independent, order-insensitive stream for one check."""
        digest = hashlib.sha256(check_id.encode()).digest()
        words = np.frombuffer(digest[:16], dtype=np.uint32)
        return np.random.default_rng(
            [self.config.seed % 2**32, *(int(w) for w in words)])

    def tol(self, check_id: str, anchor: str, default: float) -> float:
        t = self.config.tolerances
        return float(t.get(check_id, t.get(anchor, default)))


class Check(NamedTuple):
    id: str
    anchor: str
    run: Callable[[CheckContext], CheckResult]


def _fit_slope(steps, errs) -> float:
    e = np.maximum(np.asarray(errs, float), 1e-16)
    return float(np.polyfit(np.log(np.asarray(steps, float)), np.log(e), 1)[0])


def _res(ctx: CheckContext, cid: str, anchor: str, residual: float,
         default_tol: float, *, slope: float | None = None,
         slope_target: float | None = None, slope_band: float = 0.1,
         extra_ok: bool = True, note: str = "") -> CheckResult:
    tol = ctx.tol(cid, anchor, default_tol)
    ok = bool(residual <= tol) and extra_ok
    if slope_target is not None:
        ok = ok and slope is not None and math.isfinite(slope) \
            and abs(slope - slope_target) <= slope_band
    return CheckResult(cid, anchor, float(residual), tol, ok,
                       slope=None if slope is None else float(slope),
                       note=note)


def _points(ctx, cid, chart, n, t=0.0):
    uv = interior_samples(chart, n, ctx.rng(cid))
    return uv, SurfacePoint(chart, uv[:, 0], uv[:, 1], t)


# ---------------------------------------------------------------------------
# ambient comparison: chart-exact operators vs closest-point FD operators
# ---------------------------------------------------------------------------

_SCALARS = ("height", "centrifugal", "trig_mix")
_VECTORS = ("position", "rotation", "poly_vector")
_TENSORS = ("pressure_projector", "outer_rot", "antisym_witness")


def _fields_of(cfg: SuiteConfig, kind: str):
    defaults = {"scalar": _SCALARS, "vector": _VECTORS, "tensor": _TENSORS}[kind]
    if cfg.fields:
        picked = tuple(n for n in cfg.fields if catalog.FIELDS[n].kind == kind)
        if picked:
            return picked
    return defaults


_COMPARE_OPS = {
    "gradient": ("scalar",
                 lambda f, sp: value_of(C.grad_scalar(f, sp)),
                 A.grad_hat_scalar),
    "covariant-derivative": ("vector",
                             lambda f, sp: value_of(C.covariant_derivative(f, sp)),
                             A.covderiv_hat),
    "vector-divergence": ("vector",
                          lambda f, sp: C.div_vector(f, sp),
                          A.div_hat_vector),
    "tensor-divergence": ("tensor",
                          lambda f, sp: C.div_tensor(f, sp),
                          A.div_hat_tensor_of_transpose),
}


def _ambient_comparison(ctx: CheckContext, *, cid, anchor, surface, op):
    kind, curv, hat = _COMPARE_OPS[op]
    cfg = ctx.config
    ch = catalog.surface(surface)
    uv, sp = _points(ctx, cid, ch, N_COMPARE)
    fields = [catalog.field(n) for n in _fields_of(cfg, kind)]
    refs = [np.asarray(curv(f, sp)) for f in fields]

    hs = [float(h) for h in cfg.step("h_sweep")]
    errs = []
    for h in hs:
        st = A.ExtensionStencil(ch, uv, h=h, center=sp)
        errs.append(max(float(np.max(np.abs(hat(f, st) - r)))
                        for f, r in zip(fields, refs)))
    slope = _fit_slope(hs, errs)

    stg = A.ExtensionStencil(ch, uv, h=float(cfg.step("h_gap")), center=sp)
    gap = max(float(np.max(np.abs(hat(f, stg) - r)))
              for f, r in zip(fields, refs))
    return _res(ctx, cid, anchor, gap, 1e-5, slope=slope, slope_target=2.0,
                note=f"sweep errors {['%.1e' % e for e in errs]}")


def _transpose_witness(ctx: CheckContext, *, cid, anchor):
    ch = catalog.surface("unit_sphere")
    uv, sp = _points(ctx, cid, ch, N_COMPARE)
    f = catalog.field("antisym_witness")
    ref = C.div_tensor(f, sp)
    st = A.ExtensionStencil(ch, uv, h=float(ctx.config.step("h_gap")), center=sp)
    good = float(np.max(np.abs(A.div_hat_tensor_of_transpose(f, st) - ref)))
    bad = float(np.max(np.abs(A.div_hat_tensor(f, st) - ref)))
    tol = ctx.tol(cid, anchor, 1e-5)
    passed = good <= tol and bad > 10.0 * tol
    return CheckResult(cid, anchor, good, tol, passed,
                       note=f"without transpose the gap is {bad:.3e} "
                            f"(witness needs > {10 * tol:.0e})")


# ---------------------------------------------------------------------------
# component formulas vs direct jet differentiation (exact pathways)
# ---------------------------------------------------------------------------

def _component_partial(ctx: CheckContext, *, cid, anchor, surface):
    _, sp = _points(ctx, cid, catalog.surface(surface), N_GEN)
    worst = 0.0
    for name in ("rotation", "poly_vector", "normal_field"):
        f = catalog.field(name)
        for a in (0, 1):
            direct = value_of(C.partial_vector(f, sp, a))
            comp = C.partial_vector(f, sp, a, pathway="components")
            worst = max(worst, float(np.max(np.abs(direct - comp))))
    return _res(ctx, cid, anchor, worst, 1e-9)


def _proj_poly(sp):
    return J.matvec(sp.projector, catalog.field("poly_vector")(sp))


def _component_vector_divergence(ctx: CheckContext, *, cid, anchor, surface):
    _, sp = _points(ctx, cid, catalog.surface(surface), N_GEN)
    worst = 0.0
    for f in (catalog.field("tangent_rotation"),
              SurfaceField("proj_poly", "vector", _proj_poly, tangential=True)):
        d = C.div_vector(f, sp, "definition")
        c = C.div_vector(f, sp, "components")
        worst = max(worst, float(np.max(np.abs(d - c))))
    return _res(ctx, cid, anchor, worst, 1e-9)


def _component_tensor_divergence(ctx: CheckContext, *, cid, anchor, surface):
    _, sp = _points(ctx, cid, catalog.surface(surface), N_GEN)
    worst = 0.0
    for name in ("pressure_projector", "antisym_witness"):
        f = catalog.field(name)
        d = C.div_tensor(f, sp, "definition")
        c = C.div_tensor(f, sp, "components")
        worst = max(worst, float(np.max(np.abs(d - c))))
    return _res(ctx, cid, anchor, worst, 1e-9)


# ---------------------------------------------------------------------------
# rate of strain
# ---------------------------------------------------------------------------

def _strain_pathways(ctx: CheckContext, *, cid, anchor, surface):
    _, sp = _points(ctx, cid, catalog.surface(surface), N_GEN, t=0.3)
    e_tj = ev.metric_rate(sp, "time_jet")
    worst = max(
        float(np.max(np.abs(e_tj - ev.metric_rate(sp, "strain")))),
        float(np.max(np.abs(e_tj - ev.metric_rate(sp, "components")))),
    )
    return _res(ctx, cid, anchor, worst, 1e-10)


def _killing_strain(ctx: CheckContext, *, cid, anchor):
    _, sp = _points(ctx, cid, catalog.surface("rotating_sphere"), N_GEN, t=0.2)
    worst = max(float(np.max(np.abs(ev.metric_rate(sp, "time_jet")))),
                float(np.max(np.abs(ev.metric_rate_operator(sp)))))
    return _res(ctx, cid, anchor, worst, 1e-10,
                note="rigid rotation is a Killing flow: E must vanish")


def _expanding_strain_value(ctx: CheckContext, *, cid, anchor):
    t = 0.5
    ch = catalog.surface("expanding_sphere")
    _, sp = _points(ctx, cid, ch, N_GEN, t=t)
    rate_over_r = 0.25 / (1.0 + 0.25 * t)
    gap_ab = np.max(np.abs(ev.metric_rate(sp, "time_jet")
                           - rate_over_r * value_of(sp.metric_lo)))
    gap_op = np.max(np.abs(ev.metric_rate_operator(sp)
                           - rate_over_r * value_of(sp.projector)))
    return _res(ctx, cid, anchor, float(max(gap_ab, gap_op)), 1e-10,
                note=f"uniform expansion: E = (r'/r) g with r'/r = {rate_over_r:.6f}")


# ---------------------------------------------------------------------------
# material derivative and trajectories
# ---------------------------------------------------------------------------

def _material_pathways(ctx: CheckContext, *, cid, anchor, surface):
    _, sp = _points(ctx, cid, catalog.surface(surface), N_MAT, t=0.2)
    worst = 0.0
    for name in ("t_height", "height_sq", "trig_mix", "position", "poly_vector"):
        f = catalog.field(name)
        mc = ev.material_derivative(f, sp, "curvilinear")
        mx = ev.material_derivative(f, sp, "cartesian")
        worst = max(worst, float(np.max(np.abs(np.asarray(mc) - np.asarray(mx)))))
    return _res(ctx, cid, anchor, worst, 1e-6)


def _material_trajectory_oracle(ctx: CheckContext, *, cid, anchor):
    ch = catalog.surface("rotating_sphere")
    uv, sp = _points(ctx, cid, ch, 1, t=0.0)
    x0 = value_of(sp.pos)[0]
    md = float(np.asarray(
        ev.material_derivative(catalog.field("trig_mix"), sp, "curvilinear"))[0])

    def raw(x):  # the catalog field's ambient formula, time-independent
        return math.sin(x[0]) * math.cos(x[1]) + x[2]

    hts = [float(h) for h in ctx.config.step("h_t_sweep")]
    errs = []
    for h in hts:
        fwd = ev.integrate_flow(ch, x0, 0.0, h, richardson=False, dt=h / 4)
        bwd = ev.integrate_flow(ch, x0, 0.0, -h, richardson=False, dt=h / 4)
        fd = (raw(fwd.x) - raw(bwd.x)) / (2.0 * h)
        errs.append(abs(fd - md))
    slope = _fit_slope(hts, errs)
    return _res(ctx, cid, anchor, errs[-1], 1e-5, slope=slope, slope_target=2.0,
                note=f"independent oracle: centered difference along the "
                     f"integrated trajectory; errors {['%.1e' % e for e in errs]}")


def _trajectory_endpoints(ctx: CheckContext, *, cid, anchor):
    r1 = ev.integrate_flow(catalog.surface("expanding_sphere"),
                           np.array([1.0, 0.0, 0.0]), 0.0, 1.0)
    gap1 = float(np.max(np.abs(r1.x - [1.25, 0.0, 0.0])))
    r2 = ev.integrate_flow(catalog.surface("rotating_sphere"),
                           np.array([1.0, 0.0, 0.0]), 0.0, math.pi / 2)
    gap2 = float(np.max(np.abs(r2.x - [0.0, 1.0, 0.0])))
    return _res(ctx, cid, anchor, max(gap1, gap2), 1e-8,
                note="radial expansion reaches r(1)=1.25; a quarter turn "
                     "maps (1,0,0) to (0,1,0)")


# ---------------------------------------------------------------------------
# transport theorem (Leibniz rule)
# ---------------------------------------------------------------------------

def _leibniz_slope(ctx: CheckContext, *, cid, anchor):
    cfg = ctx.config
    ch = catalog.surface("expanding_sphere")
    hts = [float(h) for h in cfg.step("h_t_sweep")]
    res = []
    for h in hts:
        rep = ev.leibniz_residual(ch, catalog.field("height_sq"), 0.0,
                                  order_u=cfg.order("order_u"),
                                  order_v=cfg.order("order_v"), h_t=h)
        res.append(rep.residual)
    slope = _fit_slope(hts, res)
    return _res(ctx, cid, anchor, res[-1], 1e-3, slope=slope, slope_target=2.0,
                note=f"d/dt ∫f vs ∫(f' + f div v): residuals "
                     f"{['%.1e' % e for e in res]}")


def _leibniz_area_rate(ctx: CheckContext, *, cid, anchor):
    cfg = ctx.config
    t, r0, rate = 0.3, 1.0, 0.25
    ch = catalog.surface("expanding_sphere")
    rep = ev.leibniz_residual(ch, catalog.field("one"), t,
                              order_u=max(cfg.order("order_u"), 64),
                              order_v=max(cfg.order("order_v"), 128),
                              h_t=float(cfg.step("h_t")))
    r = r0 + rate * t
    closed = 8.0 * math.pi * r * rate
    worst = max(abs(rep.ddt - closed), abs(rep.transport - closed),
                abs(rep.area - 4.0 * math.pi * r * r))
    return _res(ctx, cid, anchor, float(worst), 1e-6,
                note="closed form: the sphere area 4πr² grows at 8πrr'; "
                     "Gauss nodes are interior so the full chart domain "
                     "carries no pole margin")


def _leibniz_stationary(ctx: CheckContext, *, cid, anchor):
    cfg = ctx.config
    rep = ev.leibniz_residual(catalog.surface("rotating_sphere"),
                              catalog.field("height"), 0.2,
                              order_u=cfg.order("order_u"),
                              order_v=cfg.order("order_v"),
                              h_t=float(cfg.step("h_t")))
    worst = max(abs(rep.ddt), abs(rep.transport), rep.residual,
                abs(rep.area - 4.0 * math.pi))
    return _res(ctx, cid, anchor, float(worst), 1e-6,
                note="rigid rotation transports nothing: every term vanishes "
                     "and the area stays 4π")


# ---------------------------------------------------------------------------
# flow states: headline equivalence, manufactured solutions, identities
# ---------------------------------------------------------------------------

_STATE_TIMES = {"rigid_rotation": 0.3, "rigid_rotation_moving": 0.4,
                "expansion": 0.5, "rest": 0.0}
_FORMS = ("split", "voigt", "rewritten")


def _state_setup(ctx, cid, name, n=N_STATE):
    ch, state = catalog.flow_state(name)
    t = _STATE_TIMES[name]
    uv = interior_samples(ch, n, ctx.rng(cid))
    return state, SurfacePoint(ch, uv[:, 0], uv[:, 1], t)


def _tangential_forms_agreement(ctx: CheckContext, *, cid, anchor, state):
    st, sp = _state_setup(ctx, cid, state)
    parts = [ns.residual_tangential(st, sp, form=f) for f in _FORMS]
    worst = 0.0
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            for key in ("momentum", "continuity"):
                worst = max(worst, float(np.max(np.abs(
                    parts[i][key] - parts[j][key]))))
    return _res(ctx, cid, anchor, worst, 1e-9,
                note="split / time-reconstruction / projected-rate forms, "
                     "assembled through independent machinery")


def _full_projection_tangential(ctx: CheckContext, *, cid, anchor, state):
    st, sp = _state_setup(ctx, cid, state)
    full = ns.residual_full(st, sp, "curvilinear")
    split = ns.residual_tangential(st, sp, form="split")
    P = value_of(sp.projector)
    proj = np.einsum("...ij,...j->...i", P, full["momentum"])
    gap = float(np.max(np.abs(proj - split["momentum"])))
    return _res(ctx, cid, anchor, gap, 1e-10)


def _full_projection_normal(ctx: CheckContext, *, cid, anchor, state):
    st, sp = _state_setup(ctx, cid, state)
    full = ns.residual_full(st, sp, "curvilinear")
    nor = ns.residual_normal(st, sp, variant="split")
    n = value_of(sp.normal)
    comp = np.einsum("...i,...i->...", full["momentum"], n)
    gap = float(np.max(np.abs(comp - nor["momentum"])))
    return _res(ctx, cid, anchor, gap, 1e-10)


def _manufactured_rotation_tangential(ctx: CheckContext, *, cid, anchor):
    st, sp = _state_setup(ctx, cid, "rigid_rotation")
    worst = max(float(np.max(np.abs(arr)))
                for f in _FORMS
                for arr in ns.residual_tangential(st, sp, form=f).values())
    return _res(ctx, cid, anchor, worst, 1e-9,
                note="centrifugal pressure balances rigid rotation with "
                     "no tangential force")


def _manufactured_rotation_normal(ctx: CheckContext, *, cid, anchor):
    st, sp = _state_setup(ctx, cid, "rigid_rotation")
    worst = max(
        float(np.max(np.abs(ns.residual_normal(st, sp, variant="split")["momentum"]))),
        float(np.max(np.abs(ns.residual_normal(st, sp, variant="miura")["momentum"]))),
    )
    return _res(ctx, cid, anchor, worst, 1e-9,
                note="normal closure: f_N = pκ − ‖v_T‖² for the split form, "
                     "p¹ = ‖v_T‖² for the first-expansion form")


def _manufactured_rotation_full(ctx: CheckContext, *, cid, anchor):
    st, sp = _state_setup(ctx, cid, "rigid_rotation")
    worst = 0.0
    for route in ("curvilinear", "components"):
        for arr in ns.residual_full(st, sp, route).values():
            worst = max(worst, float(np.max(np.abs(arr))))
    for arr in ns.residual_miura(st, sp).values():
        worst = max(worst, float(np.max(np.abs(arr))))
    return _res(ctx, cid, anchor, worst, 1e-9)


def _full_cartesian_route(ctx: CheckContext, *, cid, anchor):
    st, sp = _state_setup(ctx, cid, "rigid_rotation", n=N_MAT)
    worst = max(float(np.max(np.abs(arr)))
                for arr in ns.residual_full(st, sp, "cartesian").values())
    return _res(ctx, cid, anchor, worst, 1e-5,
                note="whole system assembled from closest-point FD operators "
                     "(step-limited accuracy)")


def _manufactured_expansion_momentum(ctx: CheckContext, *, cid, anchor):
    st, sp = _state_setup(ctx, cid, "expansion")
    worst = 0.0
    for system in ns.SYSTEM_IDS:
        parts = ns.residual(system, st, sp).parts
        for key, arr in parts.items():
            if key != "continuity":
                worst = max(worst, float(np.max(np.abs(arr))))
    return _res(ctx, cid, anchor, worst, 1e-9,
                note="uniform expansion balances every momentum equation "
                     "with f_N = 4μ₀r'/r² and p¹ = −f_N")


def _expansion_continuity_witness(ctx: CheckContext, *, cid, anchor):
    st, sp = _state_setup(ctx, cid, "expansion")
    t = _STATE_TIMES["expansion"]
    expected = 2.0 * 0.25 / (1.0 + 0.25 * t)
    worst = 0.0
    conts = [ns.residual_full(st, sp, "curvilinear")["continuity"],
             ns.residual_miura(st, sp)["continuity"]]
    conts += [ns.residual_tangential(st, sp, form=f)["continuity"]
              for f in _FORMS]
    for arr in conts:
        worst = max(worst, float(np.max(np.abs(arr - expected))))
    return _res(ctx, cid, anchor, worst, 1e-12,
                note=f"expansion is genuinely compressible: div v = 2r'/r = "
                     f"{expected:.6f}, not zero — the evaluator must say so")


def _manufactured_rest(ctx: CheckContext, *, cid, anchor):
    st, sp = _state_setup(ctx, cid, "rest")
    worst = 0.0
    for system in ns.SYSTEM_IDS:
        for arr in ns.residual(system, st, sp).parts.values():
            worst = max(worst, float(np.max(np.abs(arr))))
    return _res(ctx, cid, anchor, worst, 1e-12,
                note="constant pressure at rest on the ellipsoid: every "
                     "system closes with f_N = pκ exactly")


_FD_IDENTITY_KEYS = frozenset({
    "first-corrector-routes", "second-corrector",
    "composite-scalar-gradient", "pressure-pair-expansion",
})


def _flow_identities(ctx: CheckContext, *, cid, anchor, state, fd):
    st, sp = _state_setup(ctx, cid, state, n=N_MAT if fd else N_STATE)
    suite = ns.identity_suite(st, sp)
    picked = {k: v for k, v in suite.items() if (k in _FD_IDENTITY_KEYS) == fd}
    worst_key = max(picked, key=picked.get)
    return _res(ctx, cid, anchor, picked[worst_key], 1e-5 if fd else 1e-10,
                note=f"{len(picked)} identities; worst: {worst_key}")


# ---------------------------------------------------------------------------
# thin film
# ---------------------------------------------------------------------------

_THIN_ZRANGE = {"plane": 0.5, "unit_sphere": 0.5, "ellipsoid": 0.2,
                "torus": 0.3, "expanding_sphere": 0.4, "rotating_sphere": 0.5}


def _thin_frame(ctx, cid, surface, n, zmax=None, t=0.0):
    ch = catalog.surface(surface)
    rng = ctx.rng(cid)
    uv = interior_samples(ch, n, rng)
    zr = _THIN_ZRANGE[surface] if zmax is None else zmax
    z = rng.uniform(-zr, zr, n) if zr else np.zeros(n)
    return tf.thin_metric(ch, uv[:, 0], uv[:, 1], z, t=t)


def _thin_expansion(ctx: CheckContext, *, cid, anchor, surface):
    frame = _thin_frame(ctx, cid, surface, N_THIN)
    return _res(ctx, cid, anchor, tf.metric_expansion_gap(frame), 1e-11,
                note=f"exact curvature-corrected metric at {N_THIN} random "
                     f"(ξ,ζ) samples, |ζ| ≤ {_THIN_ZRANGE[surface]}")


def _thin_blocks(ctx: CheckContext, *, cid, anchor, surface):
    frame = _thin_frame(ctx, cid, surface, N_GEN)
    blocks = tf.metric_block_gaps(frame)
    zeros = tf.christoffel_limit_gaps(frame)["zero-slots"]
    return _res(ctx, cid, anchor, max(*blocks.values(), zeros), 1e-12,
                note="G_ζζ = 1, G_ζα = 0 and the ζ-slot symbols vanish "
                     "at every offset, not only in the limit")


def _thin_christoffel_limits(ctx: CheckContext, *, cid, anchor, surface):
    frame = _thin_frame(ctx, cid, surface, N_GEN, zmax=0.0)
    gaps = tf.christoffel_limit_gaps(frame)
    worst = max(gaps["normal-slot"], gaps["mixed-slot"])
    return _res(ctx, cid, anchor, worst, 1e-10,
                note="at ζ=0 the normal slot is the curvature form and the "
                     "mixed slot its negated shape operator")


def _thin_slope(ctx: CheckContext, *, cid, anchor, surface):
    ch = catalog.surface(surface)
    uv = interior_samples(ch, 40, ctx.rng(cid))
    sl = tf.expansion_slopes(ch, uv[:, 0], uv[:, 1])
    worst = max(abs(sl["metric_hi"] - 1.0), abs(sl["christoffel"] - 1.0))
    tol = ctx.tol(cid, anchor, 0.1)
    return CheckResult(cid, anchor, float(worst), tol, worst <= tol,
                       slope=float(sl["christoffel"]),
                       note=f"metric_hi slope {sl['metric_hi']:.3f}, "
                            f"christoffel slope {sl['christoffel']:.3f}")


def _thin_sphere_flat(ctx: CheckContext, *, cid, anchor):
    ch = catalog.surface("unit_sphere")
    uv = interior_samples(ch, 40, ctx.rng(cid))
    sl = tf.expansion_slopes(ch, uv[:, 0], uv[:, 1])
    return _res(ctx, cid, anchor, max(sl["christoffel_gaps"]), 1e-12,
                note="concentric spheres share their angular connection: the "
                     "tangential symbols are offset-independent, exactly")


def _thin_restriction(ctx: CheckContext, *, cid, anchor, surface):
    frame = _thin_frame(ctx, cid, surface, N_GEN, zmax=0.0)
    worst = 0.0
    for name in ("rotation", "poly_vector", "position"):
        gaps = tf.strain3_restriction(frame, catalog.field(name))
        worst = max(worst, *gaps.values())
    return _res(ctx, cid, anchor, worst, 1e-10,
                note="3D covariant/strain/divergence restrictions at ζ=0 vs "
                     "their split surface forms")


def _thin_slip(ctx: CheckContext, *, cid, anchor):
    worst = 0.0
    for surface in ctx.config.surfaces:
        frame = _thin_frame(ctx, cid, surface, N_MAT, zmax=0.0)
        rep = tf.slip_extension_report(frame, catalog.field("poly_vector"))
        worst = max(worst, *rep.values())
    return _res(ctx, cid, anchor, worst, 1e-10,
                note="the first-order corrector kills the tangential slip "
                     "combination and the normal rate at the surface exactly")


def _thin_projected_divergence(ctx: CheckContext, *, cid, anchor):
    worst = 0.0
    for surface in ("unit_sphere", "torus"):
        _, sp = _points(ctx, cid, catalog.surface(surface), N_GEN)
        for name in ("pressure_projector", "antisym_witness"):
            worst = max(worst, tf.projected_divergence_gap(
                catalog.field(name), sp))
    return _res(ctx, cid, anchor, worst, 1e-10,
                note="the two tensor-divergence conventions agree after "
                     "tangential projection")


def _thin_relative_velocity(ctx: CheckContext, *, cid, anchor):
    rng = ctx.rng(cid)
    exp_ch = catalog.surface("expanding_sphere")
    uv = interior_samples(exp_ch, N_MAT, rng)
    gap = tf.relative_velocity_gap(exp_ch, uv[:, 0], uv[:, 1], t=0.3)
    rot_ch = catalog.surface("rotating_sphere")
    uv2 = interior_samples(rot_ch, N_MAT, rng)
    drift = tf.relative_velocity_gap(rot_ch, uv2[:, 0], uv2[:, 1], t=0.3)
    tol = ctx.tol(cid, anchor, 1e-12)
    passed = gap <= tol and drift > 0.1
    return CheckResult(cid, anchor, float(gap), tol, passed,
                       note=f"normal parametrisation: w tangential part "
                            f"{gap:.2e}; rotating chart drifts by {drift:.3f} "
                            f"(witness needs > 0.1)")


# ---------------------------------------------------------------------------
# flat-extension (closest-point) expansion checks
# ---------------------------------------------------------------------------

def _pressure_pair_slope(ctx: CheckContext, *, cid, anchor):
    cfg = ctx.config
    ch = catalog.surface("unit_sphere")
    uv, sp = _points(ctx, cid, ch, N_MAT)
    p, p1 = catalog.field("height"), catalog.field("centrifugal")
    target = value_of(C.grad_scalar(p, sp)) \
        + value_of(p1(sp))[..., None] * value_of(sp.normal)
    hs = [float(h) for h in cfg.step("h_sweep")]
    errs = []
    for h in hs:
        st = A.ExtensionStencil(ch, uv, h=h, center=sp)
        errs.append(float(np.max(np.abs(
            A.pressure_pair_gradient(p, p1, st) - target))))
    slope = _fit_slope(hs, errs)
    tol = ctx.tol(cid, anchor, 1e-5)
    passed = errs[-1] <= tol and math.isfinite(slope) and slope >= 1.0
    return CheckResult(cid, anchor, errs[-1], tol, passed, slope=float(slope),
                       note="ambient gradient of p∘π + d·(p¹∘π) approaches "
                            "∇_Γp + p¹n; any slope ≥ 1 passes")


def _composite_at_surface(ctx: CheckContext, *, cid, anchor):
    cfg = ctx.config
    ch = catalog.surface("unit_sphere")
    uv, sp = _points(ctx, cid, ch, N_MAT)
    st = A.ExtensionStencil(ch, uv, h=float(cfg.step("h_gap")), center=sp)
    f, u = catalog.field("trig_mix"), catalog.field("poly_vector")
    worst = max(
        float(np.max(np.abs(A.grad_hat_scalar(f, st)
                            - value_of(C.grad_scalar(f, sp))))),
        float(np.max(np.abs(A.covderiv_hat(u, st)
                            - value_of(C.covariant_derivative(u, sp))))),
    )
    return _res(ctx, cid, anchor, worst, 1e-5,
                note="scalar and vector composite-derivative rules at zero "
                     "offset collapse to the surface operators")


def _ambient_shape_operator(ctx: CheckContext, *, cid, anchor):
    cfg = ctx.config
    worst = 0.0
    for surface in ctx.config.surfaces:
        ch = catalog.surface(surface)
        uv, sp = _points(ctx, cid, ch, N_MAT)
        st = A.ExtensionStencil(ch, uv, h=float(cfg.step("h_gap")), center=sp)
        worst = max(worst, float(np.max(np.abs(
            A.shape_from_normal(st) - value_of(sp.shape_op)))))
    return _res(ctx, cid, anchor, worst, 1e-5,
                note="differenced extended normal reproduces the jet shape "
                     "operator on every catalog surface")


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def _quadrature_plane(ctx: CheckContext, *, cid, anchor):
    val = ev.surface_integral(catalog.surface("plane"), catalog.field("one"),
                              0.0, order_u=8, order_v=8,
                              region=((0.0, 1.0), (0.0, 1.0)))
    return _res(ctx, cid, anchor, abs(val - 1.0), 1e-13)


def _quadrature_sphere_cap(ctx: CheckContext, *, cid, anchor):
    cfg = ctx.config
    ch = catalog.surface("unit_sphere")
    m = ch.margin[0]
    region = ((m, math.pi - m), (0.0, 2.0 * math.pi))
    area = ev.surface_integral(ch, catalog.field("one"), 0.0,
                               order_u=cfg.order("order_u"),
                               order_v=cfg.order("order_v"), region=region)
    closed = 4.0 * math.pi * math.cos(m)
    return _res(ctx, cid, anchor, abs(area - closed), 1e-9,
                note=f"polar margin {m:g} excludes two caps "
                     f"(fraction {1.0 - math.cos(m):.6e} of the area); "
                     f"closed form 4π·cos(margin)")


def _quadrature_sphere_moment(ctx: CheckContext, *, cid, anchor):
    cfg = ctx.config
    ch = catalog.surface("unit_sphere")
    m = ch.margin[0]
    region = ((m, math.pi - m), (0.0, 2.0 * math.pi))
    val = ev.surface_integral(ch, catalog.field("height_sq"), 0.0,
                              order_u=cfg.order("order_u"),
                              order_v=cfg.order("order_v"), region=region)
    closed = (4.0 * math.pi / 3.0) * math.cos(m) ** 3
    return _res(ctx, cid, anchor, abs(val - closed), 1e-9,
                note="∫x₃² over the margin-trimmed sphere; full-sphere "
                     "value 4π/3 scaled by cos³(margin)")


def _quadrature_refinement(ctx: CheckContext, *, cid, anchor):
    cfg = ctx.config
    ch = catalog.surface("torus")
    ou, ov = cfg.order("order_u"), cfg.order("order_v")
    a = ev.surface_integral(ch, catalog.field("height_sq"), 0.0,
                            order_u=ou, order_v=ov)
    b = ev.surface_integral(ch, catalog.field("height_sq"), 0.0,
                            order_u=ou + 8, order_v=ov + 16)
    return _res(ctx, cid, anchor, abs(a - b), 1e-10,
                note=f"order ({ou},{ov}) vs ({ou + 8},{ov + 16}) on a smooth "
                     f"periodic integrand")


# ---------------------------------------------------------------------------
# frames and curvature
# ---------------------------------------------------------------------------

def _geometry_sphere(ctx: CheckContext, *, cid, anchor):
    _, sp = _points(ctx, cid, catalog.surface("unit_sphere"), N_GEN)
    worst = max(
        float(np.max(np.abs(value_of(sp.kappa) + 2.0))),
        float(np.max(np.abs(value_of(sp.gauss) - 1.0))),
        float(np.max(np.abs(value_of(sp.shape_op) + value_of(sp.projector)))),
        float(np.max(np.abs(value_of(sp.b_lo) - value_of(sp.b_from_position)))),
    )
    return _res(ctx, cid, anchor, worst, 1e-12,
                note="outward unit sphere: κ = −2, K = 1, B = −P, and both "
                     "curvature-form routes agree")


def _geometry_torus(ctx: CheckContext, *, cid, anchor):
    ch = catalog.surface("torus")
    sp = SurfacePoint(ch, np.array([0.0, 1.3]), np.array([0.0, 0.5 * math.pi]))
    kap = value_of(sp.kappa)
    gau = value_of(sp.gauss)
    worst = max(abs(float(kap[0]) + 2.4), abs(float(gau[0]) - 0.8),
                abs(float(kap[1]) + 2.0), abs(float(gau[1])))
    return _res(ctx, cid, anchor, worst, 1e-12,
                note="outer equator: κ = −2.4, K = 0.8; top of the tube: "
                     "κ = −2, K = 0")


def _geometry_christoffel(ctx: CheckContext, *, cid, anchor, surface):
    _, sp = _points(ctx, cid, catalog.surface(surface), N_GEN)
    gap = np.max(np.abs(sp.christoffel(pathway="tangents")
                        - sp.christoffel(pathway="metric")))
    return _res(ctx, cid, anchor, float(gap), 1e-11,
                note="frame-projection route vs metric-derivative route")


def _geometry_closest_point(ctx: CheckContext, *, cid, anchor):
    cp_t = closest_point(catalog.surface("torus"),
                         np.array([2.7, 0.0, 0.0]), 0.0)
    worst = max(float(np.max(np.abs(cp_t.foot - [2.5, 0.0, 0.0]))),
                abs(float(cp_t.distance) - 0.2),
                float(np.max(np.abs(cp_t.normal - [1.0, 0.0, 0.0]))))
    x = np.array([0.3, 0.4, 1.2])
    cp_s = closest_point(catalog.surface("unit_sphere"), x, 0.0)
    r = float(np.linalg.norm(x))
    worst = max(worst,
                float(np.max(np.abs(cp_s.foot - x / r))),
                abs(float(cp_s.distance) - (r - 1.0)))
    return _res(ctx, cid, anchor, worst, 1e-8,
                note="frozen foot points: torus (2.7,0,0)→(2.5,0,0) at d=0.2; "
                     "sphere foot x/|x| at d=|x|−1")


def _geometry_reparametrization(ctx: CheckContext, *, cid, anchor):
    t = 0.4
    stat = catalog.surface("unit_sphere")
    rot = catalog.surface("rotating_sphere")
    uv, sps = _points(ctx, cid, stat, N_MAT, t=t)
    X = value_of(sps.pos)
    cp = closest_point(rot, X, t)
    spr = SurfacePoint(rot, cp.params[:, 0], cp.params[:, 1], t)
    f = catalog.field("trig_mix")
    worst = max(
        float(np.max(np.abs(value_of(spr.pos) - X))),
        float(np.max(np.abs(value_of(sps.kappa) - value_of(spr.kappa)))),
        float(np.max(np.abs(value_of(sps.gauss) - value_of(spr.gauss)))),
        float(np.max(np.abs(value_of(C.grad_scalar(f, sps))
                            - value_of(C.grad_scalar(f, spr))))),
    )
    return _res(ctx, cid, anchor, worst, 1e-10,
                note="static vs co-rotating charts of the same sphere agree "
                     "on curvatures and gradients at matched points")


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------

_DETERMINISM_PREFIXES = ("component-vector-divergence",
                         "killing-strain", "quadrature-plane")


def _report_determinism(ctx: CheckContext, *, cid, anchor):
    probes = []
    for prefix in _DETERMINISM_PREFIXES:
        for c in build_checks(ctx.config, include_determinism=False):
            if c.id.startswith(prefix):
                probes.append(c)
                break
    payloads = []
    for _ in range(2):
        results = [p.run(ctx) for p in probes]
        payloads.append(json.dumps([r.to_schema() for r in results],
                                   sort_keys=True))
    identical = payloads[0] == payloads[1]
    tol = ctx.tol(cid, anchor, 0.0)
    return CheckResult(cid, anchor, 0.0 if identical else 1.0, tol, identical,
                       note=f"{len(probes)} probe checks re-run from scratch; "
                            f"serialized bytes must match")


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

def build_checks(cfg: SuiteConfig, *, include_determinism: bool = True) -> list[Check]:
    """The full ordered check list for a config."""
    out: list[Check] = []

    def add(cid: str, anchor: str, fn, **kw):
        out.append(Check(cid, anchor, partial(fn, cid=cid, anchor=anchor, **kw)))

    comparison = "surface-vs-ambient-comparison"
    for s in cfg.surfaces:
        for op in _COMPARE_OPS:
            add(f"ambient-{op}-comparison[{s}]", comparison,
                _ambient_comparison, surface=s, op=op)
    add("ambient-transpose-witness", comparison, _transpose_witness)

    comp = "component-formulas"
    for s in cfg.surfaces:
        add(f"component-partial-vector[{s}]", comp, _component_partial, surface=s)
        add(f"component-vector-divergence[{s}]", comp,
            _component_vector_divergence, surface=s)
        add(f"component-tensor-divergence[{s}]", comp,
            _component_tensor_divergence, surface=s)

    strain = "rate-of-strain"
    for s in ("expanding_sphere", "rotating_sphere"):
        add(f"metric-rate-pathways[{s}]", strain, _strain_pathways, surface=s)
    add("killing-strain[rotating_sphere]", strain, _killing_strain)
    add("expanding-strain-value", strain, _expanding_strain_value)

    mat = "material-derivative"
    for s in ("expanding_sphere", "rotating_sphere"):
        add(f"material-derivative-pathways[{s}]", mat,
            _material_pathways, surface=s)
    add("material-derivative-trajectory-oracle", mat,
        _material_trajectory_oracle)
    add("trajectory-endpoints", "material-trajectories", _trajectory_endpoints)

    leib = "transport-theorem"
    add("leibniz-transport-slope[expanding_sphere]", leib, _leibniz_slope)
    add("leibniz-area-rate[expanding_sphere]", leib, _leibniz_area_rate)
    add("leibniz-stationary[rotating_sphere]", leib, _leibniz_stationary)

    head = "tangential-system-equivalence"
    for state in _STATE_TIMES:
        add(f"tangential-forms-agreement[{state}]", head,
            _tangential_forms_agreement, state=state)
        add(f"full-tangential-projection[{state}]", head,
            _full_projection_tangential, state=state)
        add(f"full-normal-projection[{state}]", head,
            _full_projection_normal, state=state)

    manu = "manufactured-states"
    add("manufactured-rotation-tangential", manu,
        _manufactured_rotation_tangential)
    add("manufactured-rotation-normal", manu, _manufactured_rotation_normal)
    add("manufactured-rotation-full", manu, _manufactured_rotation_full)
    add("full-cartesian-route[rigid_rotation]", manu, _full_cartesian_route)
    add("manufactured-expansion-momentum", manu,
        _manufactured_expansion_momentum)
    add("expansion-continuity-witness", manu, _expansion_continuity_witness)
    add("manufactured-rest", manu, _manufactured_rest)

    ident = "operator-identities"
    for state in ("rigid_rotation", "expansion", "rest"):
        add(f"flow-identities-exact[{state}]", ident, _flow_identities,
            state=state, fd=False)
        add(f"flow-identities-fd[{state}]", ident, _flow_identities,
            state=state, fd=True)

    thin = "thin-film-structure"
    for s in cfg.surfaces:
        add(f"thin-metric-expansion[{s}]", thin, _thin_expansion, surface=s)
        add(f"thin-metric-blocks[{s}]", thin, _thin_blocks, surface=s)
        add(f"thin-christoffel-limits[{s}]", thin,
            _thin_christoffel_limits, surface=s)
        add(f"thin-restriction-identities[{s}]", thin,
            _thin_restriction, surface=s)
    for s in ("torus", "ellipsoid"):
        if s in cfg.surfaces:
            add(f"thin-expansion-slope[{s}]", thin, _thin_slope, surface=s)
    add("thin-sphere-christoffel-flat", thin, _thin_sphere_flat)
    add("thin-slip-extension", thin, _thin_slip)
    add("thin-projected-divergence", thin, _thin_projected_divergence)
    add("thin-relative-velocity", thin, _thin_relative_velocity)

    flat = "flat-extension-expansion"
    add("pressure-pair-gradient-slope", flat, _pressure_pair_slope)
    add("composite-derivative-at-surface", flat, _composite_at_surface)
    add("ambient-shape-operator", flat, _ambient_shape_operator)

    quad = "surface-quadrature"
    add("quadrature-plane-unit-square", quad, _quadrature_plane)
    add("quadrature-sphere-cap-margin", quad, _quadrature_sphere_cap)
    add("quadrature-sphere-moment", quad, _quadrature_sphere_moment)
    add("quadrature-refinement-stability", quad, _quadrature_refinement)

    geo = "frame-and-curvature"
    add("geometry-sphere-closed-forms", geo, _geometry_sphere)
    add("geometry-torus-curvature-values", geo, _geometry_torus)
    for s in cfg.surfaces:
        add(f"geometry-christoffel-pathways[{s}]", geo,
            _geometry_christoffel, surface=s)
    add("geometry-closest-point", geo, _geometry_closest_point)
    add("geometry-reparametrization", geo, _geometry_reparametrization)

    if include_determinism:
        add("report-determinism", "reporting", _report_determinism)
    return out
