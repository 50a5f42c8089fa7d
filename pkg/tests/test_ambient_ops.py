"""Cartesian-route operators built on the closest-point extension."""

import numpy as np
from numpy.testing import assert_allclose

import oracles
from evosurf import ambient_ops as amb
from evosurf import curv_ops as ops
from evosurf.charts import closest_point, interior_samples
from evosurf.geometry import SurfacePoint, value_of
from evosurf.suite import catalog


def _stencil(chart, rng, n=20, h=1e-4, t=0.0):
    pts = interior_samples(chart, n, rng)
    sp = SurfacePoint(chart, pts[:, 0], pts[:, 1], t)
    return sp, amb.ExtensionStencil(chart, pts, t, h, center=sp)


def test_constant_extension_is_constant_along_normal(sphere):
    # f∘π is unchanged when the query moves off the surface along n
    x = np.array([0.6, -0.3, 0.9])
    res = closest_point(sphere, x)
    f = catalog.field("trig_mix")

    def ext(q):
        r = closest_point(sphere, q)
        spq = SurfacePoint(sphere, r.params[..., 0], r.params[..., 1], 0.0)
        return float(value_of(f(spq)))

    base = ext(res.foot)
    for d in (0.05, -0.08):
        assert abs(ext(res.foot + d * res.normal) - base) < 1e-12


def test_gradient_matches_plain_fd_of_extension(sphere, rng):
    sp, st = _stencil(sphere, rng, n=5)
    f = catalog.field("height")
    got = amb.grad_hat_scalar(f, st)

    def ext(q):
        r = closest_point(sphere, q.reshape(1, 3))
        spq = SurfacePoint(sphere, r.params[..., 0], r.params[..., 1], 0.0)
        return float(value_of(f(spq))[0])

    for i in range(got.shape[0]):
        fd = oracles.fd_gradient(ext, value_of(sp.pos)[i], h=1e-5)
        assert np.max(np.abs(got[i] - fd)) < 1e-6


def test_hat_gradient_is_tangential(torus, rng):
    sp, st = _stencil(torus, rng)
    g = amb.grad_hat_scalar(catalog.field("trig_mix"), st)
    n = value_of(sp.normal)
    assert np.max(np.abs(np.einsum("ni,ni->n", g, n))) < 1e-8


def test_shape_operator_from_normal_extension(ellipsoid, rng):
    sp, st = _stencil(ellipsoid, rng)
    B_amb = amb.shape_from_normal(st)
    B_cur = value_of(sp.shape_op)
    assert np.max(np.abs(B_amb - B_cur)) < 1e-5


def test_divergence_routes_converge_quadratically(sphere, rng):
    pts = interior_samples(sphere, 30, rng)
    sp = SurfacePoint(sphere, pts[:, 0], pts[:, 1], 0.0)
    u = catalog.field("rotation")
    exact = value_of(ops.div_vector(u, sp))
    hs, errs = [], []
    for h in (1e-2, 3e-3, 1e-3):
        st = amb.ExtensionStencil(sphere, pts, 0.0, h, center=sp)
        err = np.max(np.abs(amb.div_hat_vector(u, st) - exact))
        hs.append(h)
        errs.append(err)
    slope = oracles.loglog_slope(hs, errs)
    assert 1.8 < slope < 2.2
    assert errs[-1] < 1e-5


def test_tensor_divergence_needs_the_transpose(torus, rng):
    # the row-wise ambient divergence matches div_Γ only after transposing
    pts = interior_samples(torus, 20, rng)
    sp = SurfacePoint(torus, pts[:, 0], pts[:, 1], 0.0)
    T = catalog.field("antisym_witness")
    exact = value_of(ops.div_tensor(T, sp))
    st = amb.ExtensionStencil(torus, pts, 0.0, 1e-4, center=sp)
    good = np.max(np.abs(amb.div_hat_tensor_of_transpose(T, st) - exact))
    bad = np.max(np.abs(amb.div_hat_tensor(T, st) - exact))
    assert good < 1e-5
    assert bad > 1e-2


def test_pressure_pair_gradient_picks_up_normal_part(sphere, rng):
    # ∇̂(p∘π + d·p¹∘π) → ∇_Γp + p¹ n as the stencil shrinks
    pts = interior_samples(sphere, 15, rng)
    sp = SurfacePoint(sphere, pts[:, 0], pts[:, 1], 0.0)
    p = catalog.field("height")
    p1 = catalog.field("centrifugal")
    want = (value_of(ops.grad_scalar(p, sp))
            + value_of(p1(sp))[:, None] * value_of(sp.normal))
    st = amb.ExtensionStencil(sphere, pts, 0.0, 1e-4, center=sp)
    got = amb.pressure_pair_gradient(p, p1, st)
    assert np.max(np.abs(got - want)) < 1e-5
