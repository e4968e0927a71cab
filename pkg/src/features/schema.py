"""
Geometric feature schemas.

See ``docs/features.md`` for the definition of every entry.
"""
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from src.features.entity import Entity
from src.scene.model import Scene
from src.scene.stats import SegmentStats
from src.utils.config import settings
from src.utils.errors import FeatureSchemaError

NODE_FEATURES: Tuple[str, ...] = (
    "centroid_z",
    "normal_z",
    "hull_area",
    "linearness",
    "planarness",
    "scatter",
    "vertical_extent",
    "horizontal_extent",
)

PAIR_FEATURES: Tuple[str, ...] = (
    "horiz_centroid_dist",
    "vert_centroid_disp",
    "normal_dot",
    "min_dist",
    "coplanarity",
    "z_gap_signed",
)


def node_features(stats: SegmentStats) -> np.ndarray:
    """
    Per-entity shape and placement features.

    Spread features use the eigenvalues of the per-point covariance, so they do not
    grow with the number of points.
    """
    values, _ = stats.principal_axes
    l0, l1, l2 = values / stats.point_count
    horizontal = stats.centered_scatter[:2, :2] / stats.point_count
    widest = max(0.0, float(np.linalg.eigvalsh(horizontal)[-1]))
    return np.array([
        stats.centroid[2],
        abs(stats.normal[2]),
        stats.hull_area,
        max(0.0, l0 - l1),
        max(0.0, l1 - l2),
        l0,
        stats.z_max - stats.z_min,
        math.sqrt(12.0 * widest),
    ])


def pair_features(
    a: Entity,
    b: Entity,
    scene: Optional[Scene] = None,
    coplanarity_angle_deg: Optional[float] = None,
) -> np.ndarray:
    """
    Relative features of ``a`` with respect to ``b``, in argument order.

    ``min_dist`` needs the scene's distance table and is 0 without a scene.
    """
    angle = settings.coplanarity_angle_deg if coplanarity_angle_deg is None else coplanarity_angle_deg
    ca, cb = a.stats.centroid, b.stats.centroid
    na, nb = a.stats.normal, b.stats.normal
    offset = ca - cb
    alignment = abs(float(na @ nb))
    coplanarity = math.exp(-abs(float(offset @ na))) if alignment > math.cos(math.radians(angle)) else 0.0
    min_dist = scene.min_distance(a.span, b.span) if scene is not None else 0.0
    return np.array([
        math.hypot(offset[0], offset[1]),
        offset[2],
        alignment,
        min_dist,
        coplanarity,
        a.stats.z_min - b.stats.z_max,
    ])


def pair_features_with_angle(a: Entity, b: Entity, scene: Optional[Scene] = None) -> np.ndarray:
    """geom-v1 pair block plus the difference of the normals' angles with the vertical."""
    tilt_a = math.acos(min(1.0, abs(float(a.stats.normal[2]))))
    tilt_b = math.acos(min(1.0, abs(float(b.stats.normal[2]))))
    return np.append(pair_features(a, b, scene), tilt_a - tilt_b)


@dataclass(frozen=True)
class FeatureSchema:
    """Names and extractors for the node and pair feature blocks."""

    schema_id: str
    node_names: Tuple[str, ...]
    pair_names: Tuple[str, ...]
    node: Callable[[SegmentStats], np.ndarray]
    pair: Callable[..., np.ndarray]

    def length(self, parts: int) -> int:
        """Feature length for a rule with ``parts`` leaf parts."""
        return len(self.node_names) * parts + len(self.pair_names) * parts * (parts - 1) // 2


GEOM_V1 = FeatureSchema("geom-v1", NODE_FEATURES, PAIR_FEATURES, node_features, pair_features)
GEOM_V2 = FeatureSchema(
    "geom-v2",
    NODE_FEATURES,
    PAIR_FEATURES + ("vertical_angle_diff",),
    node_features,
    pair_features_with_angle,
)

SCHEMAS: Dict[str, FeatureSchema] = {s.schema_id: s for s in (GEOM_V1, GEOM_V2)}


def get_schema(schema_id: Optional[str] = None) -> FeatureSchema:
    schema_id = schema_id or settings.schema_id
    try:
        return SCHEMAS[schema_id]
    except KeyError:
        raise FeatureSchemaError(f"unknown feature schema '{schema_id}'") from None
