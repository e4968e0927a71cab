"""
JSON scene and ground-truth tree files.
"""
import json
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.scene.model import Scene, Segment, build_adjacency
from src.scene.stats import SegmentStats
from src.scene.tree import GroundTruthTree
from src.utils.errors import SchemaError
from src.utils.logging import get_logger

logger = get_logger("scene.io")


class SegmentRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: int
    count: int = Field(ge=1)
    sum: Tuple[float, float, float]
    scatter: Tuple[
        Tuple[float, float, float],
        Tuple[float, float, float],
        Tuple[float, float, float],
    ]
    z_min: float
    z_max: float
    hull_area: float = Field(ge=0.0)


class SceneRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    segments: List[SegmentRecord]
    edges: Optional[List[Tuple[int, int]]] = None
    occluded: List[Tuple[int, int]] = Field(default_factory=list)
    min_dist: Optional[List[Tuple[int, int, float]]] = None


class LeafRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    leaf: int


class TreeRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: str = Field(min_length=1)
    children: List[Union["TreeRecord", LeafRecord]] = Field(min_length=1)


TreeRecord.model_rebuild()


def describe_validation_error(error: ValidationError) -> str:
    """Render the first pydantic error as ``field.path: message``."""
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "<root>"
    return f"{location}: {first['msg']}"


def read_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in {path}: {e}")
        raise SchemaError(f"{path}: invalid JSON ({e})") from e


def write_json(data: Any, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, indent=1)
        handle.write("\n")
    return path


def scene_from_dict(data: Any, name: str = "") -> Scene:
    """Validate a decoded scene document and build the in-memory scene."""
    try:
        record = SceneRecord.model_validate(data)
    except ValidationError as e:
        raise SchemaError(describe_validation_error(e)) from e

    segments = []
    for k, seg in enumerate(record.segments):
        stats = SegmentStats(
            point_count=seg.count,
            sum=seg.sum,
            scatter=seg.scatter,
            z_min=seg.z_min,
            z_max=seg.z_max,
            hull_area=seg.hull_area,
        )
        try:
            stats.validate()
        except SchemaError as e:
            raise SchemaError(f"segments.{k}: {e}") from e
        segments.append(Segment(id=seg.id, stats=stats))

    min_dist = {(i, j): d for i, j, d in (record.min_dist or [])}
    if record.edges is None:
        return build_adjacency(segments, min_distances=min_dist, occluded=record.occluded, name=name)
    return Scene(
        segments=tuple(segments),
        edges=frozenset(record.edges),
        occluded_pairs=frozenset(record.occluded),
        min_distances=min_dist,
        name=name,
    )


def scene_to_dict(scene: Scene) -> dict:
    return {
        "segments": [
            {
                "id": s.id,
                "count": s.stats.point_count,
                "sum": s.stats.sum.tolist(),
                "scatter": s.stats.scatter.tolist(),
                "z_min": s.stats.z_min,
                "z_max": s.stats.z_max,
                "hull_area": s.stats.hull_area,
            }
            for s in scene.segments
        ],
        "edges": [list(e) for e in sorted(scene.edges)],
        "occluded": [list(e) for e in sorted(scene.occluded_pairs)],
        "min_dist": [[i, j, d] for (i, j), d in sorted(scene.min_distances.items())],
    }


def load_scene(path: Union[str, Path]) -> Scene:
    """
    Load and validate a scene file.

    Args:
        path: Path to the scene JSON

    Returns:
        Validated scene
    """
    path = Path(path)
    try:
        scene = scene_from_dict(read_json(path), name=path.stem)
    except SchemaError as e:
        logger.error(f"Invalid scene file {path}: {e}")
        raise
    logger.debug(f"Loaded scene {path}: {len(scene)} segments, {len(scene.edges)} edges")
    return scene


def save_scene(scene: Scene, path: Union[str, Path]) -> Path:
    return write_json(scene_to_dict(scene), path)


def _tree_from_record(record: TreeRecord) -> GroundTruthTree:
    children = []
    for child in record.children:
        if isinstance(child, LeafRecord):
            children.append(child.leaf)
        else:
            children.append(_tree_from_record(child))
    return GroundTruthTree(label=record.label, children=tuple(children))


def tree_from_dict(data: Any) -> GroundTruthTree:
    """Validate a decoded tree document and enforce tree invariants."""
    try:
        record = TreeRecord.model_validate(data)
    except ValidationError as e:
        raise SchemaError(describe_validation_error(e)) from e
    tree = _tree_from_record(record)
    tree.validate()
    return tree


def tree_to_dict(tree: GroundTruthTree) -> dict:
    return {
        "label": tree.label,
        "children": [
            tree_to_dict(c) if isinstance(c, GroundTruthTree) else {"leaf": c}
            for c in tree.children
        ],
    }


def load_tree(path: Union[str, Path]) -> GroundTruthTree:
    """
    Load and validate a ground-truth tree file.

    Args:
        path: Path to the tree JSON

    Returns:
        Validated tree
    """
    path = Path(path)
    try:
        return tree_from_dict(read_json(path))
    except SchemaError as e:
        logger.error(f"Invalid tree file {path}: {e}")
        raise


def save_tree(tree: GroundTruthTree, path: Union[str, Path]) -> Path:
    return write_json(tree_to_dict(tree), path)
