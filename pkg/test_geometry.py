import numpy as np
import pytest
from scipy.spatial import cKDTree

from qmfs.core.errors import ScaleError, UnsupportedSurfaceError
from qmfs.models.enums import PoolSide, SurfaceKind
from qmfs.numerics.geometry import (
    Parameterization,
    SurfaceGeometry,
    make_source_pool,
    sample_sphere,
    sample_surface,
)


def test_unit_sphere_samples_are_radial():
    samples = sample_surface(SurfaceGeometry.sphere(1.0), 100)
    assert len(samples) == 100
    np.testing.assert_allclose(np.linalg.norm(samples.points, axis=-1), 1.0, atol=1e-14)
    np.testing.assert_allclose(samples.normals, samples.points, atol=1e-14)


def test_sphere_weights_sum_to_area():
    samples = sample_surface(SurfaceGeometry.sphere(1.0), 400)
    assert 4 * np.pi * 0.999 <= samples.weights.sum() <= 4 * np.pi * 1.001


@pytest.mark.parametrize(
    "surface",
    [SurfaceGeometry.sphere(1.0), SurfaceGeometry.ellipsoid((1, 1, 2)), SurfaceGeometry.ellipsoid((0.5, 1, 1.5), (1, 0, -1))],
)
def test_frames_are_right_handed_and_orthonormal(surface):
    samples = sample_surface(surface, 150)
    n, t1, t2 = samples.normals, samples.tangents1, samples.tangents2
    for vectors in (n, t1, t2):
        np.testing.assert_allclose(np.linalg.norm(vectors, axis=-1), 1.0, atol=1e-12)
    assert np.max(np.abs(np.sum(n * t1, axis=-1))) < 1e-12
    assert np.max(np.abs(np.sum(n * t2, axis=-1))) < 1e-12
    assert np.max(np.abs(np.sum(t1 * t2, axis=-1))) < 1e-12
    assert np.all(np.sum(np.cross(t1, t2) * n, axis=-1) > 0)


def test_ellipsoid_normals_follow_the_gradient():
    samples = sample_surface(SurfaceGeometry.ellipsoid((1, 1, 2)), 100)
    x = samples.points
    gradient = np.stack([x[:, 0], x[:, 1], x[:, 2] / 4], axis=-1)
    gradient /= np.linalg.norm(gradient, axis=-1, keepdims=True)
    np.testing.assert_allclose(samples.normals, gradient, atol=1e-12)


def test_normals_point_outward():
    surface = SurfaceGeometry.ellipsoid((1, 2, 0.5))
    samples = sample_surface(surface, 200)
    assert not np.any(surface.contains(samples.points + 1e-3 * samples.normals))
    assert np.all(surface.contains(samples.points - 1e-3 * samples.normals))


def test_ellipsoid_weights_approximate_area():
    # spheroid with semi-axes (1, 1, 2): 2 pi (1 + c^2 asin(e) / (c e)), e = sqrt(1 - 1/c^2)
    c = 2.0
    e = np.sqrt(1 - 1 / c**2)
    area = 2 * np.pi * (1 + c * np.arcsin(e) / e)
    samples = sample_surface(SurfaceGeometry.ellipsoid((1, 1, c)), 2000)
    assert samples.weights.sum() == pytest.approx(area, rel=5e-3)


def test_sampling_is_deterministic():
    surface = SurfaceGeometry.ellipsoid((1, 1.5, 2))
    first, second = sample_surface(surface, 64), sample_surface(surface, 64)
    assert np.array_equal(first.points, second.points)
    assert np.array_equal(first.weights, second.weights)


def test_sample_arrays_are_immutable():
    samples = sample_surface(SurfaceGeometry.sphere(1.0), 16)
    with pytest.raises(ValueError):
        samples.points[0, 0] = 5.0


def test_sphere_sampling_is_quasi_uniform():
    points = sample_surface(SurfaceGeometry.sphere(1.0), 200).points
    distances, _ = cKDTree(points).query(points, k=2)
    nearest = distances[:, 1]
    assert nearest.max() / nearest.min() <= 3


def test_sample_surface_needs_four_points():
    with pytest.raises(ValueError):
        sample_surface(SurfaceGeometry.sphere(1.0), 3)


def test_parametric_surface_without_normals():
    def point(polar, azimuth):
        return np.stack(
            [np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth), np.cos(polar)], axis=-1
        )

    surface = SurfaceGeometry.parametric(Parameterization(point=point))
    with pytest.raises(UnsupportedSurfaceError):
        sample_surface(surface, 20)


def test_parametric_sphere_matches_builtin_sphere():
    def point(polar, azimuth):
        return 2 * np.stack(
            [np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth), np.cos(polar)], axis=-1
        )

    surface = SurfaceGeometry.parametric(Parameterization(point=point, normal=lambda p, a: point(p, a) / 2))
    samples = sample_surface(surface, 100)
    reference = sample_surface(SurfaceGeometry.sphere(2.0), 100)
    np.testing.assert_allclose(samples.points, reference.points, atol=1e-12)
    np.testing.assert_allclose(samples.normals, reference.normals, atol=1e-12)
    np.testing.assert_allclose(samples.weights, reference.weights, rtol=1e-6)


def test_interior_source_pool():
    pool = make_source_pool(SurfaceGeometry.sphere(1.0), PoolSide.INTERIOR, 0.15, 10)
    assert pool.count == 10
    np.testing.assert_allclose(np.linalg.norm(pool.points, axis=-1), 0.15, atol=1e-15)
    assert len(np.unique(pool.points, axis=0)) == 10


def test_exterior_source_pool():
    surface = SurfaceGeometry.ellipsoid((1, 1, 2))
    pool = make_source_pool(surface, PoolSide.EXTERIOR, 2.0, 5)
    assert pool.count == 5
    assert not np.any(surface.contains(pool.points))
    assert np.all(surface.implicit(pool.points) > 0)
    sphere_pool = make_source_pool(SurfaceGeometry.sphere(1.0), "exterior", 2.0, 5)
    np.testing.assert_allclose(np.linalg.norm(sphere_pool.points, axis=-1), 2.0)


def test_interior_pool_lies_inside_the_surface():
    surface = SurfaceGeometry.ellipsoid((1, 2, 0.7), (0.5, 0, 0))
    pool = make_source_pool(surface, PoolSide.INTERIOR, 0.5, 40)
    assert np.all(surface.contains(pool.points))


@pytest.mark.parametrize("side,scale", [(PoolSide.INTERIOR, 1.0), (PoolSide.EXTERIOR, 1.0), (PoolSide.INTERIOR, 1.5), (PoolSide.EXTERIOR, 0.5), (PoolSide.INTERIOR, 0.0)])
def test_source_pool_rejects_bad_scales(side, scale):
    with pytest.raises(ScaleError):
        make_source_pool(SurfaceGeometry.sphere(1.0), side, scale, 10)


def test_sources_do_not_coincide_with_node_directions():
    surface = SurfaceGeometry.sphere(1.0)
    nodes = sample_surface(surface, 20)
    pool = make_source_pool(surface, PoolSide.INTERIOR, 0.15, 10)
    directions = pool.points / 0.15
    gaps = np.linalg.norm(nodes.points[:, None, :] - directions[None, :, :], axis=-1)
    assert gaps.min() > 1e-3


def test_evaluation_sphere():
    points = sample_sphere(5.0, 200, center=(1, 0, 0))
    np.testing.assert_allclose(np.linalg.norm(points - np.array([1, 0, 0]), axis=-1), 5.0)


def test_surface_kind_from_string():
    surface = SurfaceGeometry("ellipsoid", (0, 0, 0), (1, 2, 3))
    assert surface.kind is SurfaceKind.ELLIPSOID
    assert surface.scale == 3.0
