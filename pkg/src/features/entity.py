"""
Entities: what a grammar symbol covers, summarized for feature computation.
"""
from dataclasses import dataclass
from functools import reduce
from typing import FrozenSet, Optional, Sequence, Tuple

from src.scene.stats import SegmentStats, merge_stats


@dataclass(frozen=True, eq=False)
class Entity:
    """
    A symbol instance over a span of terminals.

    Intermediate entities carry the non-intermediate parts they were built from in
    ``parts``; every other entity is its own single part.
    """

    name: str
    span: FrozenSet[int]
    stats: SegmentStats
    parts: Tuple["Entity", ...] = ()

    def leaf_parts(self) -> Tuple["Entity", ...]:
        return self.parts or (self,)

    @property
    def sort_key(self) -> Tuple[str, Tuple[int, ...]]:
        return self.name, tuple(sorted(self.span))


def make_entity(
    name: str,
    children: Sequence[Entity],
    intermediate: bool,
    stats: Optional[SegmentStats] = None,
) -> Entity:
    """
    Build the entity a rule produces from its children.

    Args:
        name: LHS symbol
        children: Child entities
        intermediate: Whether ``name`` is an intermediate symbol
        stats: Precomputed merged statistics of the children's union, if known

    Returns:
        New entity
    """
    span = frozenset().union(*(c.span for c in children))
    if stats is None:
        stats = reduce(merge_stats, (c.stats for c in children))
    parts: Tuple[Entity, ...] = ()
    if intermediate:
        parts = tuple(sorted((p for c in children for p in c.leaf_parts()), key=lambda p: p.sort_key))
    return Entity(name=name, span=span, stats=stats, parts=parts)
