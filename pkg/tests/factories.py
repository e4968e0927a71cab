"""Builders for small hand-made scenes and trees."""
from typing import Iterable, Sequence, Tuple

import numpy as np

from src.features.entity import Entity
from src.scene.model import Scene, Segment
from src.scene.stats import SegmentStats

Vec = Tuple[float, float, float]


def rect_points(origin: Vec, u: Vec, v: Vec, n: int = 6) -> np.ndarray:
    """Regular n-by-n grid over the rectangle origin + a*u + b*v."""
    a, b = np.meshgrid(np.linspace(0.0, 1.0, n), np.linspace(0.0, 1.0, n), indexing="ij")
    return np.asarray(origin) + a.reshape(-1, 1) * np.asarray(u) + b.reshape(-1, 1) * np.asarray(v)


def rect_segment(seg_id: int, origin: Vec, u: Vec, v: Vec, n: int = 6) -> Segment:
    return Segment(id=seg_id, stats=SegmentStats.from_points(rect_points(origin, u, v, n)))


def entity(name: str, seg: Segment) -> Entity:
    return Entity(name=name, span=frozenset([seg.id]), stats=seg.stats)


def chain_scene(n: int, size: float = 0.1) -> Scene:
    """``n`` coplanar squares in a row on the floor, each touching the next."""
    segments = [rect_segment(i, (i * size, 0.0, 0.0), (size, 0.0, 0.0), (0.0, size, 0.0)) for i in range(n)]
    return Scene(segments=tuple(segments), edges=frozenset((i, i + 1) for i in range(n - 1)), name=f"chain{n}")


def grid_scene() -> Scene:
    """Four squares in a 2x2 grid; edges join squares sharing a side (a 4-cycle)."""
    size = 0.1
    corners = [(0, 0), (1, 0), (0, 1), (1, 1)]
    segments = [
        rect_segment(k, (x * size, y * size, 0.0), (size, 0.0, 0.0), (0.0, size, 0.0))
        for k, (x, y) in enumerate(corners)
    ]
    return Scene(segments=tuple(segments), edges=frozenset([(0, 1), (0, 2), (1, 3), (2, 3)]), name="grid")


def scene_from(segments: Sequence[Segment], edges: Iterable[Tuple[int, int]], name: str = "") -> Scene:
    return Scene(segments=tuple(segments), edges=frozenset(edges), name=name)
