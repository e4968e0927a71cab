"""
Segmented scenes as attributed adjacency graphs.
"""
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from sklearn.neighbors import NearestNeighbors

from src.scene.stats import SegmentStats
from src.utils.config import settings
from src.utils.errors import SchemaError
from src.utils.logging import get_logger

logger = get_logger("scene.model")

Pair = Tuple[int, int]


def pair(i: int, j: int) -> Pair:
    """Canonical unordered pair."""
    return (i, j) if i <= j else (j, i)


@dataclass(frozen=True, eq=False)
class Segment:
    """A terminal: one over-segmented planar piece of the scene."""

    id: int
    stats: SegmentStats

    @property
    def centroid(self) -> np.ndarray:
        return self.stats.centroid

    @property
    def normal(self) -> np.ndarray:
        return self.stats.normal

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.stats.principal_axes[0]

    @property
    def bounding_radius(self) -> float:
        """Half-length of the segment along its major axis, assuming uniform spread."""
        return float(np.sqrt(3.0 * self.eigenvalues[0] / self.stats.point_count))


@dataclass(frozen=True, eq=False)
class Scene:
    """Segments plus the symmetric adjacency relation between them."""

    segments: Tuple[Segment, ...]
    edges: FrozenSet[Pair]
    occluded_pairs: FrozenSet[Pair] = frozenset()
    min_distances: Mapping[Pair, float] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        ids = [s.id for s in self.segments]
        if len(set(ids)) != len(ids):
            raise SchemaError("segments.id: duplicate segment id")
        known = set(ids)
        for label, pairs in (("edges", self.edges), ("occluded", self.occluded_pairs)):
            for i, j in pairs:
                if i == j:
                    raise SchemaError(f"{label}: self-edge on segment {i}")
                if i not in known or j not in known:
                    raise SchemaError(f"{label}: pair ({i}, {j}) references an unknown segment")
        object.__setattr__(self, "segments", tuple(sorted(self.segments, key=lambda s: s.id)))
        object.__setattr__(self, "edges", frozenset(pair(*e) for e in self.edges))
        object.__setattr__(self, "occluded_pairs", frozenset(pair(*e) for e in self.occluded_pairs))
        object.__setattr__(
            self, "min_distances", {pair(*k): float(v) for k, v in self.min_distances.items()}
        )

    @property
    def terminal_ids(self) -> Tuple[int, ...]:
        return tuple(s.id for s in self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    @cached_property
    def by_id(self) -> Dict[int, Segment]:
        return {s.id: s for s in self.segments}

    @cached_property
    def neighbors(self) -> Dict[int, FrozenSet[int]]:
        adjacency: Dict[int, set] = {s.id: set() for s in self.segments}
        for i, j in self.edges:
            adjacency[i].add(j)
            adjacency[j].add(i)
        return {k: frozenset(v) for k, v in adjacency.items()}

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.terminal_ids)
        g.add_edges_from(self.edges)
        return g

    @cached_property
    def index(self) -> Dict[int, int]:
        return {seg_id: k for k, seg_id in enumerate(self.terminal_ids)}

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """Pairwise minimum distances; file values win over the centroid approximation."""
        n = len(self.segments)
        matrix = np.zeros((n, n))
        for a, b in combinations(range(n), 2):
            sa, sb = self.segments[a], self.segments[b]
            d = self.min_distances.get(pair(sa.id, sb.id))
            if d is None:
                d = approximate_min_distance(sa, sb)
            matrix[a, b] = matrix[b, a] = d
        return matrix

    def min_distance(self, span_a: Iterable[int], span_b: Iterable[int]) -> float:
        """Minimum distance between two sets of terminals."""
        ia = [self.index[t] for t in span_a]
        ib = [self.index[t] for t in span_b]
        return float(self.distance_matrix[np.ix_(ia, ib)].min())

    def touches(self, span_a: FrozenSet[int], span_b: FrozenSet[int]) -> bool:
        """Whether an adjacency edge connects the two spans."""
        neighbors = self.neighbors
        return any(neighbors[t] & span_b for t in span_a)

    def is_connected(self, span: Iterable[int]) -> bool:
        span = list(span)
        return bool(span) and nx.is_connected(self.graph.subgraph(span))


def approximate_min_distance(a: Segment, b: Segment) -> float:
    """Centroid distance minus both bounding radii, floored at zero."""
    gap = np.linalg.norm(a.centroid - b.centroid) - a.bounding_radius - b.bounding_radius
    return max(0.0, float(gap))


def point_set_distance(points_a: np.ndarray, points_b: np.ndarray) -> float:
    """Exact minimum Euclidean distance between two point arrays."""
    nn = NearestNeighbors(n_neighbors=1, algorithm="kd_tree").fit(points_b)
    distances, _ = nn.kneighbors(points_a)
    return float(distances.min())


def build_adjacency(
    segments: Sequence[Segment],
    min_distances: Optional[Mapping[Pair, float]] = None,
    occluded: Iterable[Pair] = (),
    points: Optional[Mapping[int, np.ndarray]] = None,
    threshold: Optional[float] = None,
    occluded_threshold: Optional[float] = None,
    name: str = "",
) -> Scene:
    """
    Connect segments that are close enough to interact.

    Two segments are adjacent when their minimum distance is below ``threshold``
    (0.05 m), or below ``occluded_threshold`` (0.5 m) when the pair is flagged as
    occluded. Distances come from ``min_distances`` first, then from raw ``points``,
    then from the centroid/radius approximation.

    Args:
        segments: Terminals of the scene
        min_distances: Precomputed minimum distances per unordered pair
        occluded: Pairs whose in-between region is occluded
        points: Raw points per segment id, when available
        threshold: Plain adjacency threshold in meters
        occluded_threshold: Adjacency threshold for occluded pairs in meters
        name: Optional scene name

    Returns:
        Scene with its edge set
    """
    threshold = settings.adjacency_threshold if threshold is None else threshold
    occluded_threshold = (
        settings.occluded_adjacency_threshold if occluded_threshold is None else occluded_threshold
    )
    given = {pair(*k): float(v) for k, v in (min_distances or {}).items()}
    occluded_set = frozenset(pair(*p) for p in occluded)

    ordered = sorted(segments, key=lambda s: s.id)
    distances: Dict[Pair, float] = {}
    edges = set()
    for a, b in combinations(ordered, 2):
        key = pair(a.id, b.id)
        if key in given:
            d = given[key]
        elif points is not None and a.id in points and b.id in points:
            d = point_set_distance(points[a.id], points[b.id])
        else:
            d = approximate_min_distance(a, b)
        distances[key] = d
        limit = occluded_threshold if key in occluded_set else threshold
        if d < limit:
            edges.add(key)

    logger.debug(f"Built adjacency over {len(ordered)} segments: {len(edges)} edges")
    return Scene(
        segments=tuple(ordered),
        edges=frozenset(edges),
        occluded_pairs=occluded_set,
        min_distances=distances,
        name=name,
    )
