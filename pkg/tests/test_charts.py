"""Chart catalog, domain handling, and the closest-point projection."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from evosurf import charts
from evosurf.errors import ConfigError, DomainError, ProjectionAmbiguityError
from evosurf.suite import catalog


def test_catalog_names():
    assert catalog.surface_ids() == sorted(
        ["plane", "unit_sphere", "ellipsoid", "torus",
         "expanding_sphere", "rotating_sphere"])
    with pytest.raises(ConfigError):
        catalog.surface("klein_bottle")


def test_sphere_positions(sphere):
    assert_allclose(np.asarray(sphere.map(np.pi / 2, 0.0, 0.0), float),
                    [1.0, 0.0, 0.0], atol=1e-15)
    # azimuth is periodic: wrapping v by 2π lands on the same point
    a = np.asarray(sphere.map(1.0, 0.3, 0.0), float)
    b = np.asarray(sphere.map(1.0, 0.3 + 2 * np.pi, 0.0), float)
    p = sphere.wrap(np.array([1.0, 0.3 + 2 * np.pi]))
    assert_allclose(p, [1.0, 0.3], atol=1e-12)
    assert_allclose(a, b, atol=1e-12)


def test_torus_position_frozen(torus):
    # R0=2, r0=0.5: the outer equator point sits at radius 2.5
    assert_allclose(np.asarray(torus.map(0.0, 0.0, 0.0), float),
                    [2.5, 0.0, 0.0], atol=1e-14)


def test_nonperiodic_range_check(sphere):
    with pytest.raises(DomainError):
        sphere.wrap(np.array([-0.5, 0.0]))


def test_interior_samples_respect_margin(sphere, rng):
    pts = charts.interior_samples(sphere, 300, rng)
    lo, hi = sphere.domain[0]
    m = sphere.margin[0]
    assert pts[:, 0].min() >= lo + m
    assert pts[:, 0].max() <= hi - m


def test_closest_point_torus_frozen(torus):
    res = charts.closest_point(torus, np.array([2.7, 0.0, 0.0]))
    assert_allclose(res.foot, [2.5, 0.0, 0.0], atol=1e-10)
    assert_allclose(res.distance, 0.2, atol=1e-10)
    assert_allclose(res.normal, [1.0, 0.0, 0.0], atol=1e-10)


def test_closest_point_sphere_radial(sphere):
    x = np.array([0.3, 0.4, 1.2])        # ‖x‖ = 1.3
    res = charts.closest_point(sphere, x)
    assert_allclose(res.foot, x / 1.3, atol=1e-10)
    assert_allclose(res.distance, 0.3, atol=1e-10)
    # foot-point optimality: x − π is parallel to the normal
    assert_allclose(np.cross(x - res.foot, res.normal), 0.0, atol=1e-10)


def test_closest_point_batch_and_signed_distance(sphere, rng):
    d = rng.standard_normal((20, 3))
    d /= np.linalg.norm(d, axis=-1, keepdims=True)
    r = rng.uniform(0.7, 1.3, 20)
    res = charts.closest_point(sphere, d * r[:, None])
    assert_allclose(res.distance, r - 1.0, atol=1e-9)
    assert_allclose(np.linalg.norm(res.foot, axis=-1), 1.0, atol=1e-10)


def test_closest_point_ambiguity_at_torus_center(torus):
    # the axis of the torus is equidistant from a whole circle of feet
    with pytest.raises(ProjectionAmbiguityError):
        charts.closest_point(torus, np.array([0.0, 0.0, 0.0]))


def test_closest_point_warm_seed(sphere):
    x = np.array([[0.0, 1.1, 0.1]])
    cold = charts.closest_point(sphere, x)
    warm = charts.closest_point(sphere, x, seed=cold.params)
    assert_allclose(warm.foot, cold.foot, atol=1e-12)
    assert int(np.max(warm.iterations)) <= int(np.max(cold.iterations))


def test_expanding_sphere_radius(torus):
    ch = catalog.surface("expanding_sphere")
    p = np.asarray(ch.map(np.pi / 2, 0.0, 0.5), float)
    assert_allclose(np.linalg.norm(p), 1.125, rtol=1e-14)   # r(t) = 1 + t/4


def test_reparametrize_produces_same_surface(sphere):
    # shift the azimuth: a diffeomorphism of the parameter domain only
    def shift(u, v):
        return u, v + 0.7

    ch2 = charts.reparametrize(sphere, shift, sphere.domain, name="shifted")
    a = np.asarray(ch2.map(1.0, 0.3, 0.0), float)
    b = np.asarray(sphere.map(1.0, 1.0, 0.0), float)
    assert_allclose(a, b, atol=1e-14)
