"""
Parse trees: derivations annotated with spans, rules and costs.
"""
from dataclasses import dataclass, replace
from typing import FrozenSet, Iterator, List, Optional, Tuple

from src.grammar.symbols import Rule


@dataclass(frozen=True, eq=False)
class ParseNode:
    """
    One node of a derivation.

    ``cost`` is the cost of the whole subtree rooted here, ``rule_cost`` the cost of
    the rule applied at this node alone. Leaves carry their ``segment_id``.
    """

    symbol: str
    span: FrozenSet[int]
    children: Tuple["ParseNode", ...] = ()
    rule: Optional[Rule] = None
    segment_id: Optional[int] = None
    cost: float = 0.0
    rule_cost: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.segment_id is not None

    def iter_nodes(self) -> Iterator["ParseNode"]:
        yield self
        for child in self.children:
            yield from child.iter_nodes()

    def internal_nodes(self) -> List["ParseNode"]:
        return [n for n in self.iter_nodes() if not n.is_leaf]

    def leaves(self) -> List[int]:
        return [n.segment_id for n in self.iter_nodes() if n.is_leaf]

    def with_costs(self, rule_cost: float, cost: float, children: Tuple["ParseNode", ...]) -> "ParseNode":
        return replace(self, rule_cost=rule_cost, cost=cost, children=children)


ParseTree = ParseNode


def leaf_node(segment_id: int, terminal_symbol: str) -> ParseNode:
    return ParseNode(symbol=terminal_symbol, span=frozenset([segment_id]), segment_id=segment_id)
