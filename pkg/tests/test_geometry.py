"""Frames, fundamental forms, curvatures, Christoffel symbols.

Expected values are hand-derived closed forms.  Torus of radii (2, 0.5),
outward normal: at the outer equator the principal curvatures are −1/0.5
and −1/2.5, so twice the mean curvature is −2.4 and the Gauss curvature
(−2)·(−0.4) = +0.8; on top of the tube the second principal curvature
vanishes.
"""

import numpy as np
from numpy.testing import assert_allclose

import oracles
from evosurf.charts import interior_samples
from evosurf.geometry import SurfacePoint, frame, shape_and_curvature, value_of


def test_sphere_curvatures(sphere):
    sp = SurfacePoint(sphere, np.pi / 2, 0.0, 0.0)
    assert_allclose(value_of(sp.kappa), -2.0, atol=1e-13)
    assert_allclose(value_of(sp.gauss), 1.0, atol=1e-13)
    # B = −P on the unit sphere
    assert_allclose(value_of(sp.shape_op), -value_of(sp.projector), atol=1e-12)


def test_torus_curvatures_frozen(torus):
    outer = SurfacePoint(torus, 0.0, 0.0, 0.0)
    assert_allclose(value_of(outer.kappa), -2.4, atol=1e-12)
    assert_allclose(value_of(outer.gauss), 0.8, atol=1e-12)
    top = SurfacePoint(torus, 1.3, np.pi / 2, 0.0)
    assert_allclose(value_of(top.kappa), -2.0, atol=1e-12)
    assert_allclose(value_of(top.gauss), 0.0, atol=1e-12)


def test_frame_duality_and_normal(ellipsoid, rng):
    pts = interior_samples(ellipsoid, 40, rng)
    sp = SurfacePoint(ellipsoid, pts[:, 0], pts[:, 1], 0.0)
    fr = frame(ellipsoid, pts[:, 0], pts[:, 1], 0.0)
    # gᵅ·g_β = δᵅ_β and n ⟂ g_α, ‖n‖ = 1
    duality = np.einsum("nai,nbi->nab", fr.g_con, fr.g_cov)
    assert_allclose(duality, np.broadcast_to(np.eye(2), duality.shape),
                    atol=1e-12)
    assert_allclose(np.einsum("ni,nai->na", fr.n, fr.g_cov), 0.0, atol=1e-12)
    assert_allclose(np.linalg.norm(fr.n, axis=-1), 1.0, atol=1e-13)
    # metric consistency: g_αβ = g_α·g_β
    assert_allclose(value_of(sp.metric_lo),
                    np.einsum("nai,nbi->nab", fr.g_cov, fr.g_cov),
                    atol=1e-12)


def test_metric_inverse_and_projector(torus, rng):
    pts = interior_samples(torus, 30, rng)
    sp = SurfacePoint(torus, pts[:, 0], pts[:, 1], 0.0)
    g = value_of(sp.metric_lo)
    gi = value_of(sp.metric_hi)
    assert_allclose(np.einsum("nab,nbc->nac", g, gi),
                    np.broadcast_to(np.eye(2), g.shape), atol=1e-12)
    P = value_of(sp.projector)
    n = value_of(sp.normal)
    assert_allclose(P, P.swapaxes(-1, -2), atol=1e-14)
    assert_allclose(np.einsum("nij,njk->nik", P, P), P, atol=1e-12)
    assert_allclose(np.einsum("nij,nj->ni", P, n), 0.0, atol=1e-12)


def test_curvature_form_two_routes_agree(ellipsoid, rng):
    pts = interior_samples(ellipsoid, 30, rng)
    sp = SurfacePoint(ellipsoid, pts[:, 0], pts[:, 1], 0.0)
    assert_allclose(value_of(sp.b_lo), value_of(sp.b_from_position),
                    atol=1e-11)
    b = value_of(sp.b_lo)
    assert_allclose(b, b.swapaxes(-1, -2), atol=1e-12)


def test_shape_operator_traces(torus, rng):
    pts = interior_samples(torus, 30, rng)
    sd = shape_and_curvature(torus, pts[:, 0], pts[:, 1], 0.0)
    assert_allclose(np.trace(sd.B, axis1=-2, axis2=-1), sd.kappa, atol=1e-11)
    assert_allclose(sd.b_mix[..., 0, 0] * sd.b_mix[..., 1, 1]
                    - sd.b_mix[..., 0, 1] * sd.b_mix[..., 1, 0],
                    sd.K, atol=1e-11)
    assert_allclose(sd.B, sd.B.swapaxes(-1, -2), atol=1e-11)


def test_christoffel_pathways_agree(ellipsoid, rng):
    pts = interior_samples(ellipsoid, 25, rng)
    sp = SurfacePoint(ellipsoid, pts[:, 0], pts[:, 1], 0.0)
    a = sp.christoffel("tangents")
    b = sp.christoffel("metric")
    assert np.max(np.abs(a - b)) < 1e-10
    assert_allclose(a, a.swapaxes(-1, -2), atol=1e-11)  # symmetric lower pair


def test_christoffel_sphere_closed_form(sphere):
    # With polar angle u: Γ^u_vv = sin u cos u ... in the (−) convention
    # fixed by ∂_v g_v = Γ^σ_vv g_σ + b_vv n; for the unit sphere
    # Γ^u_vv = −sin u cos u and Γ^v_uv = cot u.
    u = 1.1
    sp = SurfacePoint(sphere, u, 0.7, 0.0)
    gam = sp.christoffel()
    assert_allclose(gam[0, 1, 1], -np.sin(u) * np.cos(u), atol=1e-12)
    assert_allclose(gam[1, 0, 1], 1.0 / np.tan(u), atol=1e-12)
    assert_allclose(gam[0, 0, 0], 0.0, atol=1e-13)


def test_velocity_matches_fd_on_moving_chart():
    from evosurf.suite import catalog
    ch = catalog.surface("expanding_sphere")
    sp = SurfacePoint(ch, 1.0, 2.0, 0.3)
    v = value_of(sp.velocity)
    fd = oracles.fd_jacobian(
        lambda tt: np.asarray(ch.map(1.0, 2.0, float(tt[0])), float),
        np.array([0.3]))[:, 0]
    assert_allclose(v, fd, atol=1e-9)
