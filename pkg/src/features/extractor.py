"""
The feature function f over the applicands of a rule.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from src.features.entity import Entity
from src.features.schema import FeatureSchema, get_schema
from src.scene.model import Scene
from src.utils.errors import FeatureSchemaError


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    schema_id: str

    def __len__(self) -> int:
        return len(self.values)


def expand_parts(entities: Sequence[Entity]) -> List[Entity]:
    """Leaf parts of all entities in canonical (name, span) order."""
    return sorted((p for e in entities for p in e.leaf_parts()), key=lambda p: p.sort_key)


def f(
    entities: Sequence[Entity],
    scene: Optional[Scene] = None,
    schema: Optional[FeatureSchema] = None,
    expected_length: Optional[int] = None,
) -> FeatureVector:
    """
    Features of a set of rule applicands.

    Intermediates are expanded into their leaf parts first. The vector is the node
    block of every leaf part in canonical order, followed by the pair block of every
    unordered leaf-part pair in canonical order, so it does not depend on the order
    the applicands are given in.

    Args:
        entities: Applicands of one rule application
        scene: Scene supplying minimum distances between spans
        schema: Feature schema (defaults to the configured one)
        expected_length: Length the caller's model was trained with

    Returns:
        Feature vector

    Raises:
        FeatureSchemaError: No applicands, or the length differs from ``expected_length``.
    """
    schema = schema or get_schema()
    parts = expand_parts(entities)
    if not parts:
        raise FeatureSchemaError("f needs at least one entity")
    blocks = [schema.node(p.stats) for p in parts]
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            blocks.append(schema.pair(parts[i], parts[j], scene))
    values = np.concatenate(blocks)
    if expected_length is not None and len(values) != expected_length:
        raise FeatureSchemaError(
            f"feature length {len(values)} for {len(parts)} parts does not match the model's {expected_length}"
        )
    if not np.all(np.isfinite(values)):
        raise FeatureSchemaError(f"non-finite feature value for parts {[p.name for p in parts]}")
    return FeatureVector(values=values, schema_id=schema.schema_id)
