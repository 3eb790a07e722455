"""
Closed surfaces, collocation samples and auxiliary source pools.

Points are placed with the Fibonacci (golden-angle) spiral on the unit sphere
and mapped through the surface parameterization (polar angle, azimuth).
Auxiliary surfaces carrying the sources are homothetic copies of the boundary
about its center.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence, Tuple

import numpy as np

from qmfs.core.errors import ScaleError, UnsupportedSurfaceError
from qmfs.models.enums import PoolSide, SurfaceKind

logger = logging.getLogger(__name__)

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
# azimuthal phase applied to source pools so they do not line up with nodes
SOURCE_TWIST = 0.5 * GOLDEN_ANGLE

AngleMap = Callable[[np.ndarray, np.ndarray], np.ndarray]
PointMap = Callable[[np.ndarray], np.ndarray]


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.flags.writeable = False
    return array


def fibonacci_angles(m: int, offset: float = 0.5, twist: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """Polar angle and azimuth of the m-point golden-angle spiral."""
    index = np.arange(m, dtype=float)
    z = 1.0 - 2.0 * (index + offset) / m
    polar = np.arccos(np.clip(z, -1.0, 1.0))
    azimuth = np.mod(index * GOLDEN_ANGLE + twist, 2.0 * np.pi)
    return polar, azimuth


def _unit_directions(polar: np.ndarray, azimuth: np.ndarray) -> np.ndarray:
    sin_p = np.sin(polar)
    return np.stack([sin_p * np.cos(azimuth), sin_p * np.sin(azimuth), np.cos(polar)], axis=-1)


def _polar_derivative(polar: np.ndarray, azimuth: np.ndarray) -> np.ndarray:
    cos_p = np.cos(polar)
    return np.stack([cos_p * np.cos(azimuth), cos_p * np.sin(azimuth), -np.sin(polar)], axis=-1)


def fibonacci_directions(m: int, offset: float = 0.5, twist: float = 0.0) -> np.ndarray:
    return _unit_directions(*fibonacci_angles(m, offset, twist))


@dataclass(frozen=True)
class Parameterization:
    """User surface: point(polar, azimuth) and normal(polar, azimuth), optional implicit."""

    point: AngleMap
    normal: Optional[AngleMap] = None
    implicit: Optional[PointMap] = None


@dataclass(frozen=True)
class SurfaceGeometry:
    kind: SurfaceKind
    center: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    radii: Tuple[float, float, float] = (1.0, 1.0, 1.0)
    parameterization: Optional[Parameterization] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", SurfaceKind(self.kind))
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        object.__setattr__(self, "radii", tuple(float(v) for v in self.radii))
        if len(self.center) != 3 or len(self.radii) != 3:
            raise ValueError("center and radii must have three components")
        if min(self.radii) <= 0:
            raise ValueError("radii must be positive")
        if self.kind is SurfaceKind.PARAMETRIC and self.parameterization is None:
            raise UnsupportedSurfaceError("parametric surface needs a parameterization")

    @classmethod
    def sphere(cls, radius: float = 1.0, center: Sequence[float] = (0.0, 0.0, 0.0)) -> "SurfaceGeometry":
        return cls(SurfaceKind.SPHERE, tuple(center), (radius, radius, radius))

    @classmethod
    def ellipsoid(cls, radii: Sequence[float], center: Sequence[float] = (0.0, 0.0, 0.0)) -> "SurfaceGeometry":
        return cls(SurfaceKind.ELLIPSOID, tuple(center), tuple(radii))

    @classmethod
    def parametric(
        cls, parameterization: Parameterization, center: Sequence[float] = (0.0, 0.0, 0.0)
    ) -> "SurfaceGeometry":
        return cls(SurfaceKind.PARAMETRIC, tuple(center), (1.0, 1.0, 1.0), parameterization)

    @property
    def scale(self) -> float:
        """Characteristic length used for separation tolerances."""
        return max(self.radii)

    def _center(self) -> np.ndarray:
        return np.asarray(self.center)

    def _radii(self) -> np.ndarray:
        return np.asarray(self.radii)

    def point(self, polar: np.ndarray, azimuth: np.ndarray) -> np.ndarray:
        if self.kind is SurfaceKind.PARAMETRIC:
            return np.asarray(self.parameterization.point(polar, azimuth), dtype=float)
        return self._center() + self._radii() * _unit_directions(polar, azimuth)

    def normal(self, polar: np.ndarray, azimuth: np.ndarray) -> np.ndarray:
        if self.kind is SurfaceKind.PARAMETRIC:
            if self.parameterization.normal is None:
                raise UnsupportedSurfaceError("parameterization provides no normals")
            normals = np.asarray(self.parameterization.normal(polar, azimuth), dtype=float)
        elif self.kind is SurfaceKind.SPHERE:
            return _unit_directions(polar, azimuth)
        else:
            # gradient of sum (x_k / r_k)^2 at x = c + r u is proportional to u / r
            normals = _unit_directions(polar, azimuth) / self._radii()
        return normals / np.linalg.norm(normals, axis=-1, keepdims=True)

    def polar_tangent(self, polar: np.ndarray, azimuth: np.ndarray) -> np.ndarray:
        if self.kind is SurfaceKind.PARAMETRIC:
            h = 1e-6
            return (self.point(polar + h, azimuth) - self.point(polar - h, azimuth)) / (2 * h)
        return self._radii() * _polar_derivative(polar, azimuth)

    def area_element(self, polar: np.ndarray, azimuth: np.ndarray) -> np.ndarray:
        """Surface area per unit solid angle of the parameter sphere."""
        if self.kind is SurfaceKind.SPHERE:
            return np.full(np.shape(polar), self.radii[0] ** 2)
        if self.kind is SurfaceKind.ELLIPSOID:
            # linear map R: dA' = det(R) |R^-1 u| dA
            u = _unit_directions(polar, azimuth)
            return float(np.prod(self.radii)) * np.linalg.norm(u / self._radii(), axis=-1)
        h = 1e-6
        d_polar = self.polar_tangent(polar, azimuth)
        d_azimuth = (self.point(polar, azimuth + h) - self.point(polar, azimuth - h)) / (2 * h)
        return np.linalg.norm(np.cross(d_polar, d_azimuth), axis=-1) / np.sin(polar)

    def implicit(self, x: np.ndarray) -> np.ndarray:
        """Negative inside, zero on, positive outside the surface."""
        x = np.asarray(x, dtype=float)
        if self.kind is SurfaceKind.PARAMETRIC:
            if self.parameterization.implicit is None:
                raise UnsupportedSurfaceError("parameterization provides no implicit function")
            return np.asarray(self.parameterization.implicit(x), dtype=float)
        return np.sum(((x - self._center()) / self._radii()) ** 2, axis=-1) - 1.0

    def contains(self, x: np.ndarray) -> np.ndarray:
        return self.implicit(x) < 0.0

    def scaled(self, factor: float) -> "SurfaceGeometry":
        """Homothetic copy about the center."""
        if self.kind is SurfaceKind.PARAMETRIC:
            base = self.parameterization
            center = self._center()

            def point(polar, azimuth):
                return center + factor * (base.point(polar, azimuth) - center)

            implicit = None
            if base.implicit is not None:
                def implicit(x):
                    return base.implicit(center + (np.asarray(x) - center) / factor)

            scaled = Parameterization(point=point, normal=base.normal, implicit=implicit)
            return SurfaceGeometry(SurfaceKind.PARAMETRIC, self.center, self.radii, scaled)
        return SurfaceGeometry(self.kind, self.center, tuple(factor * r for r in self.radii))


@dataclass(frozen=True, eq=False)
class SurfaceSample:
    point: np.ndarray
    normal: np.ndarray
    tangent1: np.ndarray
    tangent2: np.ndarray
    weight: float


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Array form of a list of SurfaceSample; rows are aligned."""

    points: np.ndarray
    normals: np.ndarray
    tangents1: np.ndarray
    tangents2: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, index: int) -> SurfaceSample:
        return SurfaceSample(
            point=self.points[index],
            normal=self.normals[index],
            tangent1=self.tangents1[index],
            tangent2=self.tangents2[index],
            weight=float(self.weights[index]),
        )

    def __iter__(self) -> Iterator[SurfaceSample]:
        for index in range(len(self)):
            yield self[index]

    def subset(self, index: np.ndarray) -> "SampleSet":
        return SampleSet(
            points=_frozen(self.points[index]),
            normals=_frozen(self.normals[index]),
            tangents1=_frozen(self.tangents1[index]),
            tangents2=_frozen(self.tangents2[index]),
            weights=_frozen(self.weights[index]),
        )


@dataclass(frozen=True, eq=False)
class SourcePool:
    points: np.ndarray
    side: PoolSide
    scale: float = field(default=1.0)

    @property
    def count(self) -> int:
        return len(self.points)


def sample_surface(surface: SurfaceGeometry, m: int, twist: float = 0.0) -> SampleSet:
    """m quasi-uniform samples with outward normals, tangent frames and weights."""
    if m < 4:
        raise ValueError("at least 4 samples are required")
    polar, azimuth = fibonacci_angles(m, twist=twist)
    points = surface.point(polar, azimuth)
    normals = surface.normal(polar, azimuth)

    # t1 from the polar derivative, Gram-Schmidt against n; t2 = n x t1
    raw = surface.polar_tangent(polar, azimuth)
    raw = raw - np.sum(raw * normals, axis=-1, keepdims=True) * normals
    tangents1 = raw / np.linalg.norm(raw, axis=-1, keepdims=True)
    tangents2 = np.cross(normals, tangents1)

    weights = surface.area_element(polar, azimuth) * (4.0 * np.pi / m)
    logger.debug("sampled surface kind=%s m=%d area=%.6g", surface.kind.value, m, weights.sum())
    return SampleSet(
        points=_frozen(points),
        normals=_frozen(normals),
        tangents1=_frozen(tangents1),
        tangents2=_frozen(tangents2),
        weights=_frozen(weights),
    )


def sample_sphere(radius: float, m: int, center: Sequence[float] = (0.0, 0.0, 0.0)) -> np.ndarray:
    """Fibonacci points on a sphere (evaluation sets)."""
    return np.asarray(center, dtype=float) + radius * fibonacci_directions(m)


def make_source_pool(surface: SurfaceGeometry, side: PoolSide, scale: float, n: int) -> SourcePool:
    """n source points on the homothetic copy of the surface scaled by `scale`."""
    side = PoolSide(side)
    if n < 1:
        raise ValueError("source pool needs at least one point")
    if side is PoolSide.INTERIOR and not 0.0 < scale < 1.0:
        raise ScaleError(f"interior auxiliary surface needs 0 < scale < 1, got {scale}")
    if side is PoolSide.EXTERIOR and not scale > 1.0:
        raise ScaleError(f"exterior auxiliary surface needs scale > 1, got {scale}")

    polar, azimuth = fibonacci_angles(n, twist=SOURCE_TWIST)
    points = surface.scaled(scale).point(polar, azimuth)
    return SourcePool(points=_frozen(points), side=side, scale=float(scale))
