"""
Synthetic labelled scenes built from a template.
"""
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.scene.model import Scene, Segment, build_adjacency, pair
from src.scene.stats import SegmentStats
from src.scene.tree import GroundTruthTree
from src.synth.template import Range, SceneTemplate
from src.utils.config import settings
from src.utils.logging import get_logger

logger = get_logger("synth.generator")


@dataclass(frozen=True)
class Panel:
    """A planar rectangle: ``origin`` plus any combination of the edge vectors ``u`` and ``v``."""

    origin: Tuple[float, float, float]
    u: Tuple[float, float, float]
    v: Tuple[float, float, float]

    def grid(self, spacing: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Points on a regular grid, with their integer grid coordinates."""
        u, v = np.asarray(self.u), np.asarray(self.v)
        nu = max(2, int(round(np.linalg.norm(u) / spacing)) + 1)
        nv = max(2, int(round(np.linalg.norm(v) / spacing)) + 1)
        iu, iv = np.meshgrid(np.arange(nu), np.arange(nv), indexing="ij")
        iu, iv = iu.ravel(), iv.ravel()
        a = (iu / (nu - 1))[:, None]
        b = (iv / (nv - 1))[:, None]
        points = np.asarray(self.origin) + a * u + b * v
        return points, iu, iv


def split_pieces(iu: np.ndarray, iv: np.ndarray, pieces: int) -> List[np.ndarray]:
    """
    Masks cutting a grid into 1 to 3 pieces that all border each other.

    Two pieces are the halves along u; three pieces cut the second half again along v.
    """
    if pieces == 1:
        return [np.ones(len(iu), dtype=bool)]
    first = iu < (iu.max() + 1) // 2
    if pieces == 2:
        return [first, ~first]
    low_v = iv < (iv.max() + 1) // 2
    return [first, ~first & low_v, ~first & ~low_v]


@dataclass
class _SceneBuilder:
    template: SceneTemplate
    rng: np.random.Generator
    segments: List[Segment] = field(default_factory=list)
    points: Dict[int, np.ndarray] = field(default_factory=dict)
    part_segments: Dict[str, List[int]] = field(default_factory=dict)

    def uniform(self, bounds: Range) -> float:
        return float(self.rng.uniform(*bounds))

    def part(self, label: str, panel: Panel) -> GroundTruthTree:
        """Sample a part's points, cut it into segments and return ``label -> Plane``."""
        points, iu, iv = panel.grid(self.template.point_spacing)
        if self.template.noise_sigma > 0:
            points = points + self.rng.normal(0.0, self.template.noise_sigma, size=points.shape)
        low, high = self.template.oversegmentation
        pieces = int(self.rng.integers(low, high + 1))
        plane: Optional[GroundTruthTree] = None
        for mask in split_pieces(iu, iv, pieces):
            seg_id = len(self.segments)
            chunk = points[mask]
            self.segments.append(Segment(id=seg_id, stats=SegmentStats.from_points(chunk)))
            self.points[seg_id] = chunk
            self.part_segments.setdefault(label, []).append(seg_id)
            children = (seg_id,) if plane is None else (plane, seg_id)
            plane = GroundTruthTree(settings.plane_symbol, children)
        return GroundTruthTree(label, (plane,))

    def occluded_pairs(self) -> List[Tuple[int, int]]:
        pairs = []
        for a, b in self.template.occluded:
            for i, j in product(self.part_segments.get(a, []), self.part_segments.get(b, [])):
                pairs.append(pair(i, j))
        return sorted(set(pairs))


def _complex(label: str, base: GroundTruthTree, members: List[GroundTruthTree]) -> GroundTruthTree:
    node = GroundTruthTree(label, (base,))
    for member in members:
        node = GroundTruthTree(label, (node, member))
    return node


def gen_scene(template: SceneTemplate, seed: int, name: str = "") -> Tuple[Scene, GroundTruthTree]:
    """
    Generate one labelled office scene.

    The floor spans ``room_size`` squared at z = 0 with the wall along its back edge.
    The table stands in front of the wall; monitor, keyboard and computer sit on
    its top and the chair faces it from the front. Object placements never overlap.

    Args:
        template: Scene template
        seed: Seed of the scene's random generator
        name: Scene name

    Returns:
        The scene with adjacency built from its points, and its ground-truth tree
    """
    t = template
    b = _SceneBuilder(template=t, rng=np.random.default_rng(seed))
    present = {obj: bool(b.rng.random() < t.probability(obj)) for obj in sorted(t.include)}
    size = t.room_size

    floor = b.part("Floor", Panel((0.0, 0.0, 0.0), (size, 0.0, 0.0), (0.0, size, 0.0)))

    top_z = b.uniform(t.table_height)
    width, depth = b.uniform(t.table_width), b.uniform(t.table_depth)
    x0 = b.uniform((0.15, size - width - 0.15))
    y_back = size - 0.1
    y_front = y_back - depth

    top = b.part("tableTop", Panel((x0, y_front, top_z), (width, 0.0, 0.0), (0.0, depth, 0.0)))
    leg = b.part("tableLeg", Panel((x0 + 0.02, y_front, 0.01), (0.0, depth, 0.0), (0.0, 0.0, top_z - 0.03)))
    if present.get("tableDrawer"):
        drawer_x = x0 + width * 0.5
        drawer = b.part(
            "tableDrawer",
            Panel((drawer_x, y_front, top_z - 0.2), (min(0.4, width * 0.4), 0.0, 0.0), (0.0, 0.0, 0.18)),
        )
        table = GroundTruthTree("Table", (top, drawer, leg))
    else:
        table = GroundTruthTree("Table", (leg, top))

    on_table: List[GroundTruthTree] = []
    desk_x = x0 + 0.35 * width
    if present.get("monitor"):
        w, h = b.uniform(t.monitor_width), b.uniform(t.monitor_height)
        panel = Panel((desk_x - w / 2, y_back - 0.15, top_z + 0.01), (w, 0.0, 0.0), (0.0, 0.0, h))
        on_table.append(b.part("monitor", panel))
    if present.get("keyboard"):
        w = b.uniform(t.keyboard_size)
        panel = Panel((desk_x - w / 2, y_front + 0.08, top_z + 0.03), (w, 0.0, 0.0), (0.0, 0.15, 0.0))
        on_table.append(b.part("keyboard", panel))
    if present.get("CPU"):
        h = b.uniform(t.cpu_height)
        right = x0 + width - 0.1
        side = b.part("CPUSide", Panel((right, y_front + 0.05, top_z + 0.01), (0.0, 0.4, 0.0), (0.0, 0.0, h)))
        front = b.part("CPUFront", Panel((right - 0.2, y_front + 0.04, top_z + 0.01), (0.19, 0.0, 0.0), (0.0, 0.0, h)))
        on_table.append(GroundTruthTree("CPU", (side, front)))

    on_floor: List[GroundTruthTree] = []
    if present.get("Wall"):
        on_floor.append(b.part("Wall", Panel((0.0, size + 0.02, 0.01), (size, 0.0, 0.0), (0.0, 0.0, t.wall_height))))
    on_floor.append(_complex("TableComplex", table, on_table))
    if present.get("Chair"):
        seat_z = b.uniform(t.seat_height)
        seat_y = y_front - 0.6
        base = b.part("chairBase", Panel((desk_x - 0.225, seat_y, seat_z), (0.45, 0.0, 0.0), (0.0, 0.45, 0.0)))
        back = b.part(
            "chairBackRest",
            Panel((desk_x - 0.225, seat_y - 0.02, seat_z + 0.02), (0.45, 0.0, 0.0), (0.0, 0.0, 0.45)),
        )
        on_floor.append(GroundTruthTree("Chair", (base, back)))

    root = GroundTruthTree(settings.start_symbol, (_complex("FloorComplex", floor, on_floor),))
    scene = build_adjacency(b.segments, occluded=b.occluded_pairs(), points=b.points, name=name)
    root.validate()
    logger.debug(f"Generated scene '{name}' (seed {seed}): {len(scene)} segments, {len(scene.edges)} edges")
    return scene, root
