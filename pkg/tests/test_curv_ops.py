"""Surface gradient, covariant derivative, divergences — exact properties."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from evosurf import curv_ops as ops
from evosurf import jets as J
from evosurf.charts import interior_samples
from evosurf.errors import RepresentationError
from evosurf.geometry import SurfacePoint, value_of
from evosurf.suite import catalog


@pytest.fixture()
def sp(sphere, rng):
    pts = interior_samples(sphere, 50, rng)
    return SurfacePoint(sphere, pts[:, 0], pts[:, 1], 0.0)


def test_gradient_is_tangential(sp):
    g = ops.grad_scalar(catalog.field("trig_mix"), sp)
    n = value_of(sp.normal)
    assert_allclose(np.einsum("ni,ni->n", value_of(g), n), 0.0, atol=1e-12)


def test_gradient_of_constant_vanishes(sp):
    g = ops.grad_scalar(catalog.field("one"), sp)
    assert np.max(np.abs(value_of(g))) < 1e-13


def test_sphere_height_gradient_closed_form(sphere):
    # On the unit sphere ∇_Γ x₃ = e₃ − x₃·x (tangential part of e₃)
    u, v = 1.0, 2.2
    sp = SurfacePoint(sphere, u, v, 0.0)
    g = value_of(ops.grad_scalar(catalog.field("height"), sp))
    x = value_of(sp.pos)
    e3 = np.array([0.0, 0.0, 1.0])
    assert_allclose(g, e3 - x[2] * x, atol=1e-12)


def test_covariant_derivative_shape_and_tangency(sp):
    D = value_of(ops.covariant_derivative(catalog.field("rotation"), sp))
    P = value_of(sp.projector)
    assert D.shape[-2:] == (3, 3)
    # both slots tangential: P D P = D
    assert_allclose(np.einsum("nij,njk,nkl->nil", P, D, P), D, atol=1e-11)


def test_divergence_is_trace_of_covariant_derivative(sp):
    u = catalog.field("poly_vector")
    D = value_of(ops.covariant_derivative(u, sp))
    div = value_of(ops.div_vector(u, sp))
    assert_allclose(np.trace(D, axis1=-2, axis2=-1), div, atol=1e-11)


def test_tangent_rotation_is_divergence_free(sp):
    # the projected rotation field generates an isometry of the sphere
    div = value_of(ops.div_vector(catalog.field("tangent_rotation"), sp))
    assert np.max(np.abs(div)) < 1e-12


def test_divergence_pathways_agree(sp):
    u = catalog.field("tangent_rotation")
    a = value_of(ops.div_vector(u, sp, pathway="definition"))
    b = value_of(ops.div_vector(u, sp, pathway="components"))
    assert np.max(np.abs(a - b)) < 1e-12


def test_partial_vector_pathways_agree(sp):
    u = catalog.field("rotation")
    for alpha in (0, 1):
        a = value_of(ops.partial_vector(u, sp, alpha, pathway="direct"))
        b = value_of(ops.partial_vector(u, sp, alpha, pathway="components"))
        assert np.max(np.abs(a - b)) < 1e-11


def test_tensor_divergence_requires_tangential_representation(sp):
    # a tensor with normal legs cannot be written in the g_α ⊗ g_β basis
    def bad(s):
        n = s.normal
        return J.outer(n, n)

    with pytest.raises(RepresentationError):
        value_of(ops.div_tensor(bad, sp, pathway="components"))


def test_tensor_divergence_pathways_agree(sp):
    T = catalog.field("pressure_projector")
    a = value_of(ops.div_tensor(T, sp, pathway="definition"))
    b = value_of(ops.div_tensor(T, sp, pathway="components"))
    assert np.max(np.abs(a - b)) < 1e-11


def test_projector_divergence_closed_form(sp):
    # div_Γ P = κ n on any surface: for P itself the formula reduces to
    # the curvature normal.  (On the sphere κ = −2, so div_Γ P = −2x.)
    def proj(s):
        return s.projector

    got = value_of(ops.div_tensor(proj, sp))
    want = value_of(sp.kappa)[:, None] * value_of(sp.normal)
    assert_allclose(got, want, atol=1e-11)


def test_covariant_derivative_is_projected_transpose(sp):
    # ∇_Γu = P ∇_Sᵀu relates the projected and raw gradients
    u = catalog.field("poly_vector")
    full = value_of(ops.full_gradient(u, sp))
    cov = value_of(ops.covariant_derivative(u, sp))
    P = value_of(sp.projector)
    assert_allclose(np.einsum("nij,nkj->nik", P, full), cov, atol=1e-11)


def test_component_reconstruction_roundtrip(sp):
    from evosurf import fields
    u = catalog.field("tangent_rotation")
    c = fields.vector_components(u(sp), sp, "contravariant")
    back = fields.reconstruct(c)
    assert_allclose(value_of(back), value_of(u(sp)), atol=1e-12)
    c2 = fields.convert(c, "covariant")
    back2 = fields.reconstruct(c2)
    assert_allclose(value_of(back2), value_of(u(sp)), atol=1e-12)
