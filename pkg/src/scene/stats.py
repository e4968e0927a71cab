"""
Additive second-moment summaries of point sets.

A ``SegmentStats`` is all the parser keeps about the points of a segment or of any
entity built from segments: merging two summaries is exact for count, sum and
scatter, so plane fits and features of arbitrarily large entities never need the
points themselves.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from src.utils.errors import PlaneFitError, SchemaError


@dataclass(frozen=True, eq=False)
class SegmentStats:
    """Second-moment summary of a point set (meters)."""

    point_count: int
    sum: np.ndarray
    scatter: np.ndarray
    z_min: float
    z_max: float
    hull_area: float = 0.0

    def __post_init__(self):
        total = np.asarray(self.sum, dtype=np.float64).reshape(3)
        scatter = np.asarray(self.scatter, dtype=np.float64).reshape(3, 3)
        total.setflags(write=False)
        scatter.setflags(write=False)
        object.__setattr__(self, "sum", total)
        object.__setattr__(self, "scatter", scatter)
        object.__setattr__(self, "point_count", int(self.point_count))
        object.__setattr__(self, "z_min", float(self.z_min))
        object.__setattr__(self, "z_max", float(self.z_max))
        object.__setattr__(self, "hull_area", float(self.hull_area))

    @classmethod
    def from_points(cls, points: np.ndarray, hull_area: Optional[float] = None) -> "SegmentStats":
        """
        Summarize a point array.

        Args:
            points: Array of shape (n, 3)
            hull_area: Convex hull area of the points projected on their best-fit
                plane; computed when omitted

        Returns:
            Statistics of the point set
        """
        points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        if len(points) == 0:
            raise SchemaError("cannot summarize an empty point set")
        if hull_area is None:
            hull_area = projected_hull_area(points)
        return cls(
            point_count=len(points),
            sum=points.sum(axis=0),
            scatter=points.T @ points,
            z_min=points[:, 2].min(),
            z_max=points[:, 2].max(),
            hull_area=hull_area,
        )

    def validate(self) -> None:
        """Check the invariants of a summary loaded from outside."""
        if self.point_count < 1:
            raise SchemaError("point_count must be >= 1")
        if self.z_min > self.z_max:
            raise SchemaError("z_min must not exceed z_max")
        if self.hull_area < 0:
            raise SchemaError("hull_area must be non-negative")
        if not np.allclose(self.scatter, self.scatter.T, rtol=1e-9, atol=1e-12):
            raise SchemaError("scatter must be symmetric")
        if not (np.all(np.isfinite(self.sum)) and np.all(np.isfinite(self.scatter))):
            raise SchemaError("sum and scatter must be finite")
        smallest = np.linalg.eigvalsh(self.scatter)[0]
        if smallest < -1e-9 * max(1.0, float(np.trace(self.scatter))):
            raise SchemaError("scatter must be positive semidefinite")

    @property
    def centroid(self) -> np.ndarray:
        return self.sum / self.point_count

    @cached_property
    def centered_scatter(self) -> np.ndarray:
        """Scatter about the centroid, symmetrized."""
        centered = self.scatter - np.outer(self.sum, self.sum) / self.point_count
        return (centered + centered.T) / 2.0

    @cached_property
    def principal_axes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (descending, clamped at 0) and matching unit eigenvectors (columns)."""
        values, vectors = np.linalg.eigh(self.centered_scatter)
        values = np.clip(values[::-1], 0.0, None)
        return values, vectors[:, ::-1]

    @property
    def normal(self) -> np.ndarray:
        """Unit normal of the best-fit plane, sign-canonicalized."""
        return orient_normal(self.principal_axes[1][:, 2])


def merge_stats(a: SegmentStats, b: SegmentStats) -> SegmentStats:
    """
    Merge two summaries.

    Count, sum and scatter add exactly; the z range is the union. Hull area is the
    sum of the parts since the points are not retained.
    """
    return SegmentStats(
        point_count=a.point_count + b.point_count,
        sum=a.sum + b.sum,
        scatter=a.scatter + b.scatter,
        z_min=min(a.z_min, b.z_min),
        z_max=max(a.z_max, b.z_max),
        hull_area=a.hull_area + b.hull_area,
    )


def orient_normal(normal: np.ndarray) -> np.ndarray:
    """Flip a normal so z is positive, ties broken on x then y."""
    normal = np.asarray(normal, dtype=np.float64)
    normal = normal / np.linalg.norm(normal)
    for component in (normal[2], normal[0], normal[1]):
        if abs(component) > 1e-12:
            return normal if component > 0 else -normal
    return normal


def plane_fit(stats: SegmentStats) -> Tuple[np.ndarray, float]:
    """
    Fit a plane to the points summarized by ``stats``.

    Returns:
        The unit normal (eigenvector of the smallest centered eigenvalue) and the
        residual: the sum of squared point-to-plane distances.

    Raises:
        PlaneFitError: Fewer than three points.
    """
    if stats.point_count < 3:
        raise PlaneFitError("insufficient points for plane")
    values, _ = stats.principal_axes
    return stats.normal, float(values[2])


def plane_residual(stats: SegmentStats) -> float:
    """Plane-fit residual, zero for sets too small to leave the plane."""
    if stats.point_count < 3:
        return 0.0
    return plane_fit(stats)[1]


def projected_hull_area(points: np.ndarray) -> float:
    """Area of the convex hull of ``points`` projected onto their dominant plane."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(points) < 3:
        return 0.0
    centered = points - points.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    planar = centered @ vt[:2].T
    try:
        # for 2-D input ConvexHull.volume is the enclosed area
        return float(ConvexHull(planar).volume)
    except QhullError:
        return 0.0
