"""Material derivatives, flow trajectories, quadrature, transport theorem.

Closed forms used as oracles:
  * unit square region of the plane chart: area = 1;
  * unit sphere, whole chart: area = 4π; restricted to polar angles
    [m, π−m]: area = 4π·cos m and ∫ x₃² dA = (4π/3)·cos³ m;
  * torus (R₀, r₀) area = 4π²·R₀·r₀;
  * expanding sphere r(t) = 1 + t/4: d/dt Area = 8πrṙ.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

import oracles
from evosurf import evolution as evo
from evosurf.charts import interior_samples
from evosurf.geometry import SurfacePoint, value_of
from evosurf.suite import catalog

MARGIN = 0.15  # polar trim of the sphere charts in the catalog


def test_plane_unit_square_area():
    plane = catalog.surface("plane")
    a = evo.surface_integral(plane, catalog.field("one"), 0.0,
                             region=((0.0, 1.0), (0.0, 1.0)))
    assert_allclose(a, 1.0, rtol=1e-13)


def test_sphere_full_and_trimmed_area(sphere):
    full = evo.surface_integral(sphere, catalog.field("one"), 0.0)
    assert_allclose(full, 4 * np.pi, rtol=1e-12)
    region = ((MARGIN, np.pi - MARGIN), (0.0, 2 * np.pi))
    trimmed = evo.surface_integral(sphere, catalog.field("one"), 0.0,
                                   region=region)
    assert_allclose(trimmed, 4 * np.pi * np.cos(MARGIN), rtol=1e-12)


def test_sphere_trimmed_moment(sphere):
    region = ((MARGIN, np.pi - MARGIN), (0.0, 2 * np.pi))
    m = evo.surface_integral(sphere, catalog.field("height_sq"), 0.0,
                             region=region)
    assert_allclose(m, (4 * np.pi / 3) * np.cos(MARGIN) ** 3, rtol=1e-12)


def test_torus_area(torus):
    a = evo.surface_integral(torus, catalog.field("one"), 0.0)
    assert_allclose(a, 4 * np.pi ** 2 * 2.0 * 0.5, rtol=1e-12)


def test_quadrature_refinement_is_stable(torus):
    a = evo.surface_integral(torus, catalog.field("height_sq"), 0.0,
                             order_u=48, order_v=96)
    b = evo.surface_integral(torus, catalog.field("height_sq"), 0.0,
                             order_u=56, order_v=112)
    assert abs(a - b) < 1e-12 * max(1.0, abs(a))


def test_material_derivative_pathways_agree(rng):
    ch = catalog.surface("expanding_sphere")
    pts = interior_samples(ch, 25, rng)
    sp = SurfacePoint(ch, pts[:, 0], pts[:, 1], 0.3)
    for name in ("trig_mix", "t_height"):
        f = catalog.field(name)
        a = evo.material_derivative(f, sp, "curvilinear")
        b = evo.material_derivative(f, sp, "cartesian")
        assert np.max(np.abs(a - b)) < 1e-6


def test_material_derivative_against_trajectory_fd():
    # independent oracle: differentiate f along an integrated trajectory
    ch = catalog.surface("rotating_sphere")
    u0, v0, t0 = 1.2, 0.8, 0.0
    sp = SurfacePoint(ch, u0, v0, t0)
    f = catalog.field("trig_mix")
    exact = float(evo.material_derivative(f, sp, "curvilinear"))

    def along(tau):
        if tau == t0:
            p = np.array([u0, v0])
        else:
            res = evo.integrate_flow(ch, value_of(sp.pos), t0, tau,
                                     dt=abs(tau - t0) / 64, richardson=False)
            p = res.params
        spt = SurfacePoint(ch, p[..., 0], p[..., 1], tau)
        return float(value_of(f(spt)))

    fd = oracles.central_diff(along, t0, h=1e-3)
    assert abs(exact - fd) < 1e-6


def test_integrate_flow_endpoints_frozen():
    # expanding sphere: radial motion, (1,0,0) ↦ (1.25,0,0) over [0,1]
    ch = catalog.surface("expanding_sphere")
    res = evo.integrate_flow(ch, np.array([1.0, 0.0, 0.0]), 0.0, 1.0)
    assert_allclose(res.x, [1.25, 0.0, 0.0], atol=1e-8)
    # rotating sphere: quarter turn about e₃, (1,0,0) ↦ (0,1,0)
    ch2 = catalog.surface("rotating_sphere")
    res2 = evo.integrate_flow(ch2, np.array([1.0, 0.0, 0.0]), 0.0,
                              np.pi / 2)
    assert_allclose(res2.x, [0.0, 1.0, 0.0], atol=1e-8)
    assert float(res2.error_estimate) < 1e-8


def test_metric_rate_pathways_agree(rng):
    ch = catalog.surface("expanding_sphere")
    pts = interior_samples(ch, 20, rng)
    sp = SurfacePoint(ch, pts[:, 0], pts[:, 1], 0.5)
    a = evo.metric_rate(sp, pathway="time_jet")
    b = evo.metric_rate(sp, pathway="strain")
    assert np.max(np.abs(a - b)) < 1e-10


def test_expanding_metric_rate_closed_form(rng):
    # g(t) = r(t)²·g(angles) ⇒ ∂_t g = (2ṙ/r)·g
    ch = catalog.surface("expanding_sphere")
    pts = interior_samples(ch, 20, rng)
    t = 0.5
    sp = SurfacePoint(ch, pts[:, 0], pts[:, 1], t)
    rate = evo.metric_rate(sp)          # E_αβ = ½ ∂_t g_αβ
    factor = 0.25 / (1 + 0.25 * t)      # = ṙ/r
    assert np.max(np.abs(rate - factor * value_of(sp.metric_lo))) < 1e-12


def test_leibniz_expanding_sphere_area_rate():
    t = 0.3
    ch = catalog.surface("expanding_sphere")
    rep = evo.leibniz_residual(ch, catalog.field("one"), t,
                               order_u=64, order_v=128)
    r, rdot = 1 + 0.25 * t, 0.25
    assert abs(rep.ddt - 8 * np.pi * r * rdot) < 1e-6
    assert abs(rep.area - 4 * np.pi * r ** 2) < 1e-9
    assert abs(rep.residual) < 1e-6


def test_leibniz_residual_shrinks_quadratically():
    ch = catalog.surface("expanding_sphere")
    f = catalog.field("height_sq")
    errs = []
    hs = (1e-2, 3e-3, 1e-3)
    for h in hs:
        rep = evo.leibniz_residual(ch, f, 0.3, h_t=h)
        errs.append(abs(rep.residual))
    slope = oracles.loglog_slope(hs, errs)
    assert 1.8 < slope < 2.2


def test_leibniz_stationary_surface():
    # rotation preserves area and transports the integrand
    ch = catalog.surface("rotating_sphere")
    rep = evo.leibniz_residual(ch, catalog.field("height"), 0.2)
    assert abs(rep.residual) < 1e-6
    assert abs(rep.area - 4 * np.pi) < 1e-9


def test_zero_time_span_flow_is_identity(sphere):
    x = np.array([0.0, 1.0, 0.0])
    res = evo.integrate_flow(sphere, x, 0.0, 0.0)
    assert_allclose(res.x, x, atol=1e-15)
    assert res.steps == 0
