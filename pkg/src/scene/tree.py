"""
Hand-labelled (or generated) ground-truth parse trees.
"""
from dataclasses import dataclass
from typing import Iterator, List, Tuple, Union

from src.utils.errors import SchemaError

Child = Union["GroundTruthTree", int]


@dataclass(frozen=True)
class GroundTruthTree:
    """A labelled node; integer children are leaf segment ids."""

    label: str
    children: Tuple[Child, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    def leaves(self) -> List[int]:
        """Segment ids under this node, in left-to-right order."""
        found: List[int] = []
        for child in self.children:
            if isinstance(child, GroundTruthTree):
                found.extend(child.leaves())
            else:
                found.append(child)
        return found

    def iter_nodes(self) -> Iterator["GroundTruthTree"]:
        """Pre-order traversal over internal nodes."""
        yield self
        for child in self.children:
            if isinstance(child, GroundTruthTree):
                yield from child.iter_nodes()

    def validate(self) -> None:
        """Enforce non-empty internal nodes and distinct leaves."""
        for node in self.iter_nodes():
            if not node.children:
                raise SchemaError(f"children: node '{node.label}' has no children")
            if not node.label:
                raise SchemaError("label: empty node label")
        leaves = self.leaves()
        seen = set()
        for leaf in leaves:
            if leaf in seen:
                raise SchemaError(f"leaf: duplicate leaf segment id {leaf}")
            seen.add(leaf)
