"""Tubular-neighborhood frame: exact metric expansion and its limits.

Frozen sphere values (equator point (π/2, 0), hand-derived): the offset
surface at ζ is a sphere of radius 1+ζ, so G_θθ = G_φφ = (1+ζ)² — at
ζ = 0.1 that is 1.21 — while G_ζζ = 1 and the ζ row of the Christoffel
array reproduces Γ^ζ_αβ = diag(−1, −1) at ζ = 0 (the b_αβ of the unit
sphere with this normal orientation).
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from evosurf import thin_film as tf
from evosurf.charts import interior_samples
from evosurf.errors import FoldoverError
from evosurf.geometry import SurfacePoint, value_of
from evosurf.suite import catalog


def test_sphere_offset_metric_frozen(sphere):
    fr = tf.thin_metric(sphere, np.pi / 2, 0.0, 0.1)
    assert_allclose(np.diagonal(fr.metric_lo, axis1=-2, axis2=-1),
                    [1.21, 1.21, 1.0], atol=1e-13)
    fr0 = tf.thin_metric(sphere, np.pi / 2, 0.0, 0.0)
    assert_allclose(fr0.christoffel[2, :2, :2], -np.eye(2), atol=1e-13)


def test_metric_expansion_exact(ellipsoid, rng):
    # G_αβ = g − 2ζb + ζ²(b g⁻¹ b), G_ζα = 0, G_ζζ = 1 — exactly, not
    # asymptotically.  The ellipsoid chart has a non-diagonal metric, so
    # it distinguishes b g⁻¹ b from the wrong contraction b b g⁻¹.
    pts = interior_samples(ellipsoid, 40, rng)
    for zeta in (-0.15, 0.0, 0.1):
        fr = tf.thin_metric(ellipsoid, pts[:, 0], pts[:, 1], zeta)
        assert tf.metric_expansion_gap(fr) < 1e-11
        gaps = tf.metric_block_gaps(fr)
        assert max(gaps.values()) < 1e-12


def test_christoffel_limits_at_zero(torus, rng):
    pts = interior_samples(torus, 30, rng)
    fr = tf.thin_metric(torus, pts[:, 0], pts[:, 1], 0.0)
    gaps = tf.christoffel_limit_gaps(fr)
    assert max(gaps.values()) < 1e-10


def test_expansion_slopes_on_torus(torus):
    rep = tf.expansion_slopes(torus, 1.0, 0.7)
    assert 0.9 < rep["metric_hi"] < 1.1
    assert 0.9 < rep["christoffel"] < 1.1


def test_sphere_tangential_christoffels_are_radius_independent(sphere):
    # concentric spheres share the angular parametrization, so the
    # tangential Christoffel block does not move with ζ at all
    rep = tf.expansion_slopes(sphere, 1.2, 0.5)
    assert max(rep["christoffel_gaps"]) < 1e-12


def test_foldover_raises_at_curvature_radius(sphere):
    with pytest.raises(FoldoverError):
        tf.thin_metric(sphere, np.pi / 2, 0.0, -1.0)


def test_strain_restriction_identities(sphere, rng):
    pts = interior_samples(sphere, 30, rng)
    fr = tf.thin_metric(sphere, pts[:, 0], pts[:, 1], 0.0)
    rot = catalog.field("rotation")
    rep = tf.strain3_restriction(fr, rot)
    assert max(rep.values()) < 1e-10


def test_slip_extension_zero_normal_derivative(torus, rng):
    pts = interior_samples(torus, 25, rng)
    fr = tf.thin_metric(torus, pts[:, 0], pts[:, 1], 0.0)
    rep = tf.slip_extension_report(fr, catalog.field("poly_vector"))
    assert max(rep.values()) < 1e-10


def test_relative_velocity_vanishes_for_normal_motion():
    # the expanding sphere moves along its normal: material and normal
    # velocities coincide, so the tangential slip is zero ...
    ch = catalog.surface("expanding_sphere")
    assert tf.relative_velocity_gap(ch, 1.1, 0.4, t=0.3) < 1e-12
    # ... while the rotating sphere has genuinely tangential motion
    ch2 = catalog.surface("rotating_sphere")
    assert tf.relative_velocity_gap(ch2, 1.1, 0.4, t=0.3) > 0.1


def test_projected_divergence_identity(sphere, rng):
    pts = interior_samples(sphere, 25, rng)
    sp = SurfacePoint(sphere, pts[:, 0], pts[:, 1], 0.0)
    T = catalog.field("pressure_projector")
    assert tf.projected_divergence_gap(T, sp) < 1e-10
