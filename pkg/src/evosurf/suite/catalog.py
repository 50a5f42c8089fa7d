"""Named test surfaces and closed-form fields.

Every chart here is an analytic immersion with a hand-written unit normal
and (where moving) a hand-written material velocity; the geometry layer
cross-checks both against the jet-derived quantities on every evaluation,
so a typo in a closed form cannot silently skew a verification run.

The moving charts are *material* parametrisations: a fixed (ξ¹, ξ²)
follows a particle.  ``expanding_sphere`` grows radially (r(t) = r₀ + ṙt),
``rotating_sphere`` rotates rigidly about e₃ — the standard stationary-
shape/moving-material test case, whose velocity e₃×x is a Killing field.

Fields are chart-independent evaluators (see :mod:`evosurf.fields`); the
same named field serves every surface, which is what makes suite configs
a plain cross product of surface ids and field names.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .. import jets as J
from ..charts import Chart
from ..errors import ConfigError
from ..fields import SurfaceField, ambient_scalar, ambient_vector
from ..geometry import value_of
from ..navier_stokes import FlowState

__all__ = [
    "plane", "unit_sphere", "ellipsoid", "torus",
    "expanding_sphere", "rotating_sphere",
    "rigid_rotation", "expansion", "rest",
    "surface", "field", "flow_state",
    "surface_ids", "field_names", "state_ids",
    "SURFACES", "FIELDS", "STATES",
]


# ---------------------------------------------------------------------------
# surfaces
# ---------------------------------------------------------------------------

def _zero_velocity(u, v, t):
    zero = 0.0 * (u + v + t)
    return J.stack([zero, zero, zero], -1)


def plane() -> Chart:
    """Flat patch R = (ξ¹, ξ², 0) over (−1.5, 1.5)²; n = e₃."""
    def mp(u, v, t):
        zero = 0.0 * (u + v + t)
        return J.stack([u + zero, v, zero], -1)

    def nrm(u, v, t):
        zero = 0.0 * (u + v + t)
        return J.stack([zero, zero, zero + 1.0], -1)

    return Chart(
        name="plane",
        map=mp,
        domain=((-1.5, 1.5), (-1.5, 1.5)),
        margin=(0.2, 0.2),
        normal=nrm,
        velocity=_zero_velocity,
        reach_hint=1.0,
        scale=1.0,
    )


def _sphere_dir(u, v):
    su, cu = J.sin(u), J.cos(u)
    sv, cv = J.sin(v), J.cos(v)
    return J.stack([su * cv, su * sv, cu], -1)


def unit_sphere() -> Chart:
    """Unit sphere in polar/azimuthal coordinates; n = x (outward)."""
    def mp(u, v, t):
        return _sphere_dir(u, v) + 0.0 * t

    def nrm(u, v, t):
        return _sphere_dir(u, v) + 0.0 * t

    return Chart(
        name="unit_sphere",
        map=mp,
        domain=((0.0, math.pi), (0.0, 2.0 * math.pi)),
        periodic=(False, True),
        margin=(0.15, 0.0),
        normal=nrm,
        velocity=_zero_velocity,
        reach_hint=0.9,
        scale=1.0,
    )


def ellipsoid(a: float = 1.2, b: float = 1.0, c: float = 0.8) -> Chart:
    """Triaxial ellipsoid (x/a)² + (y/b)² + (z/c)² = 1.

    The outward normal is the normalized gradient of the level function,
    i.e. proportional to (x/a², y/b², z/c²).
    """
    def mp(u, v, t):
        d = _sphere_dir(u, v)
        return J.stack([a * d[..., 0], b * d[..., 1], c * d[..., 2]], -1) + 0.0 * t

    def nrm(u, v, t):
        d = _sphere_dir(u, v)
        m = J.stack([d[..., 0] / a, d[..., 1] / b, d[..., 2] / c], -1)
        return m / J.norm(m)[..., None] + 0.0 * t

    return Chart(
        name="ellipsoid",
        map=mp,
        domain=((0.0, math.pi), (0.0, 2.0 * math.pi)),
        periodic=(False, True),
        margin=(0.15, 0.0),
        normal=nrm,
        velocity=_zero_velocity,
        reach_hint=0.4,
        scale=max(a, b, c),
    )


def torus(R0: float = 2.0, r0: float = 0.5) -> Chart:
    """Torus of revolution about e₃; u = major angle, v = minor angle.

    n = (cos u cos v, sin u cos v, sin v) points out of the tube.
    """
    if not r0 < R0:
        raise ConfigError(f"torus needs r0 < R0, got R0={R0}, r0={r0}")

    def mp(u, v, t):
        su, cu = J.sin(u), J.cos(u)
        sv, cv = J.sin(v), J.cos(v)
        w = R0 + r0 * cv
        return J.stack([w * cu, w * su, r0 * sv], -1) + 0.0 * t

    def nrm(u, v, t):
        su, cu = J.sin(u), J.cos(u)
        sv, cv = J.sin(v), J.cos(v)
        return J.stack([cu * cv, su * cv, sv], -1) + 0.0 * t

    return Chart(
        name="torus",
        map=mp,
        domain=((0.0, 2.0 * math.pi), (0.0, 2.0 * math.pi)),
        periodic=(True, True),
        normal=nrm,
        velocity=_zero_velocity,
        reach_hint=0.9 * r0,
        scale=R0 + r0,
    )


# Polar frame of the two *moving* sphere charts.  The canonical probe
# points (1,0,0) and (0,0,1) used throughout the test-suite sit on the
# coordinate axes; a chart with its pole on either axis degenerates right
# where the probes live, so the material charts use a polar axis tilted to
# (1,1,1)/√3 — both probes then lie ~0.955 rad from the pole, deep inside
# the chart interior.
_EC = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
_EA = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
_EB = np.array([1.0, 1.0, -2.0]) / math.sqrt(6.0)


def _tilted_dir(u, v):
    su, cu = J.sin(u), J.cos(u)
    sv, cv = J.sin(v), J.cos(v)
    return ((su * cv)[..., None] * _EA + (su * sv)[..., None] * _EB
            + cu[..., None] * _EC)


def expanding_sphere(r0: float = 1.0, rate: float = 0.25) -> Chart:
    """Radially expanding sphere r(t) = r₀ + ṙ·t (material parametrisation).

    Velocity ṙ·(x/|x|) is purely normal; the normal itself is frozen in t.
    """
    def mp(u, v, t):
        d = _tilted_dir(u, v)
        r = r0 + rate * t
        return d * r[..., None] if isinstance(r, J.Jet) else d * r

    def nrm(u, v, t):
        return _tilted_dir(u, v) + 0.0 * t

    def vel(u, v, t):
        return _tilted_dir(u, v) * rate + 0.0 * t

    return Chart(
        name="expanding_sphere",
        map=mp,
        domain=((0.0, math.pi), (0.0, 2.0 * math.pi)),
        periodic=(False, True),
        margin=(0.15, 0.0),
        normal=nrm,
        velocity=vel,
        reach_hint=0.7,
        scale=1.0,
    )


def rotating_sphere(omega: float = 1.0) -> Chart:
    """Unit sphere rotating rigidly about e₃ with angular speed ω.

    Shape is stationary; the material velocity ω e₃×x is tangential (a
    Killing field: the rate of strain vanishes identically).
    """
    def _mat(u, v, t):
        p = _tilted_dir(u, v)
        s, c = J.sin(omega * t), J.cos(omega * t)
        return J.stack([c * p[..., 0] - s * p[..., 1],
                        s * p[..., 0] + c * p[..., 1],
                        p[..., 2] + 0.0 * t], -1)

    def vel(u, v, t):
        p = _mat(u, v, t)
        return J.stack([-omega * p[..., 1], omega * p[..., 0],
                        0.0 * p[..., 2]], -1)

    return Chart(
        name="rotating_sphere",
        map=_mat,
        domain=((0.0, math.pi), (0.0, 2.0 * math.pi)),
        periodic=(False, True),
        margin=(0.15, 0.0),
        normal=_mat,
        velocity=vel,
        reach_hint=0.9,
        scale=1.0,
    )


SURFACES: dict[str, Callable[..., Chart]] = {
    "plane": plane,
    "unit_sphere": unit_sphere,
    "ellipsoid": ellipsoid,
    "torus": torus,
    "expanding_sphere": expanding_sphere,
    "rotating_sphere": rotating_sphere,
}


def surface(name: str, **params) -> Chart:
    """Build a catalog surface by id, forwarding optional shape parameters."""
    try:
        builder = SURFACES[name]
    except KeyError:
        raise ConfigError(
            f"unknown surface {name!r}; catalog has {sorted(SURFACES)}"
        ) from None
    return builder(**params)


def surface_ids() -> list[str]:
    return sorted(SURFACES)


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

_ASYM = np.array([[0.0, -1.0, 0.5],
                  [1.0, 0.0, -0.25],
                  [-0.5, 0.25, 0.0]])


def _rotation(x, t):
    return J.stack([-x[..., 1], x[..., 0], 0.0 * x[..., 2]], -1)


def _tangent_rotation(sp):
    return J.matvec(sp.projector, _rotation(sp.pos, sp.vt))


def _pressure_projector(sp):
    p = 0.5 * (sp.pos[..., 0] ** 2 + sp.pos[..., 1] ** 2)
    return sp.projector * p[..., None, None]


def _antisym_witness(sp):
    return J.matmul(J.matmul(sp.projector, J.asjet(_ASYM, sp.pos)),
                    sp.projector)


def _outer_rot(sp):
    return J.outer(sp.pos, _rotation(sp.pos, sp.vt))


FIELDS: dict[str, SurfaceField] = {
    f.name: f
    for f in [
        ambient_scalar("one", lambda x, t: 0.0 * x[..., 2] + 1.0),
        ambient_scalar("height", lambda x, t: x[..., 2]),
        ambient_scalar("height_sq", lambda x, t: x[..., 2] ** 2),
        ambient_scalar("t_height", lambda x, t: t * x[..., 2]),
        ambient_scalar("centrifugal",
                       lambda x, t: 0.5 * (x[..., 0] ** 2 + x[..., 1] ** 2)),
        ambient_scalar("trig_mix",
                       lambda x, t: J.sin(x[..., 0]) * J.cos(x[..., 1]) + x[..., 2]),
        ambient_vector("position", lambda x, t: x),
        ambient_vector("rotation", _rotation),
        ambient_vector("poly_vector",
                       lambda x, t: J.stack([x[..., 1] * x[..., 2],
                                             x[..., 0] + x[..., 2] ** 2,
                                             x[..., 0] * x[..., 1]], -1)),
        SurfaceField("tangent_rotation", "vector", _tangent_rotation,
                     tangential=True),
        SurfaceField("normal_field", "vector", lambda sp: sp.normal),
        SurfaceField("velocity_field", "vector", lambda sp: sp.velocity),
        SurfaceField("pressure_projector", "tensor", _pressure_projector,
                     tangential=True),
        SurfaceField("antisym_witness", "tensor", _antisym_witness,
                     tangential=True),
        SurfaceField("outer_rot", "tensor", _outer_rot),
    ]
}


def field(name: str) -> SurfaceField:
    try:
        return FIELDS[name]
    except KeyError:
        raise ConfigError(
            f"unknown field {name!r}; catalog has {sorted(FIELDS)}"
        ) from None


def field_names() -> list[str]:
    return sorted(FIELDS)


# ---------------------------------------------------------------------------
# manufactured flow states
# ---------------------------------------------------------------------------

def _zero_vector(sp):
    return sp.pos * 0.0


def _zero_scalar(sp):
    return sp.pos[..., 2] * 0.0


def rigid_rotation(moving: bool = False):
    """Rigid rotation v = e₃×x on the unit sphere with centrifugal pressure.

    Balances every implemented system exactly: f_N = pκ − ‖v_T‖² closes
    the full momentum equation, p¹ = ‖v_T‖² the pressure-pair one, and
    V_Γ = 0 the normal-speed constraint.  ``moving=True`` puts the same
    physics on the rotating material chart, so the two variants must give
    identical residuals — a parametrisation-invariance probe.
    """
    chart = rotating_sphere() if moving else unit_sphere()
    v_t = FIELDS["rotation"]
    p = FIELDS["centrifugal"]

    def speed_sq(sp):
        return value_of(p(sp)) * 2.0

    def f_n(sp):
        return value_of(p(sp)) * (value_of(sp.kappa) - 2.0)

    return chart, FlowState(
        name="rigid_rotation_moving" if moving else "rigid_rotation",
        v_T=v_t, p=p, p1=speed_sq, V_Gamma=0.0, f_N=f_n, v1=v_t)


def expansion(r0: float = 1.0, rate: float = 0.25, mu0: float = 1.0):
    """Uniform normal expansion of a sphere, v = ṙn.

    Momentum balances in every form (f_N = 4μ₀ṙ/r² carries the viscous
    normal force; p ≡ 0; p¹ = −f_N), but the flow is *compressible*: the
    inextensibility residual is exactly −ṙκ = 2ṙ/r — the catalog's honest
    nonzero constraint witness.
    """
    chart = expanding_sphere(r0=r0, rate=rate)

    def radius(sp):
        return r0 + rate * value_of(sp.vt)

    def p1(sp):
        return -4.0 * mu0 * rate / radius(sp) ** 2

    def f_n(sp):
        return 4.0 * mu0 * rate / radius(sp) ** 2

    return chart, FlowState(
        name="expansion", v_T=_zero_vector, p=_zero_scalar, p1=p1,
        V_Gamma=rate, f_N=f_n, v1=_zero_vector, mu0=mu0)


def rest(pressure: float = 0.3):
    """Zero velocity with constant pressure on the stationary ellipsoid.

    Not force-free: constant pressure on a curved surface pushes along
    pκn, so f_N = pκ closes the balance.  Every rate, every strain and
    every tangential residual is identically zero.
    """
    chart = ellipsoid()

    def p(sp):
        return _zero_scalar(sp) + pressure

    def f_n(sp):
        return pressure * value_of(sp.kappa)

    return chart, FlowState(
        name="rest", v_T=_zero_vector, p=p, p1=0.0, V_Gamma=0.0,
        f_N=f_n, v1=_zero_vector)


STATES: dict[str, Callable] = {
    "rigid_rotation": rigid_rotation,
    "rigid_rotation_moving": lambda: rigid_rotation(moving=True),
    "expansion": expansion,
    "rest": rest,
}


def flow_state(name: str, **params):
    """(chart, FlowState) for a named manufactured state."""
    try:
        builder = STATES[name]
    except KeyError:
        raise ConfigError(
            f"unknown state {name!r}; catalog has {sorted(STATES)}"
        ) from None
    return builder(**params)


def state_ids() -> list[str]:
    return sorted(STATES)
