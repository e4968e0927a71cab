"""
Segment labels read off parse trees.
"""
from typing import Dict, Iterable, Optional, Union

from src.grammar.grammar import Grammar
from src.grammar.tree import ParseNode
from src.scene.tree import GroundTruthTree
from src.utils.config import settings

NONE_LABEL = "none"

Tree = Union[ParseNode, GroundTruthTree]


def is_label_symbol(symbol: str, grammar: Optional[Grammar] = None) -> bool:
    """Whether a symbol names an object or part, as opposed to structure."""
    generic = {settings.terminal_symbol, settings.plane_symbol, settings.start_symbol}
    if grammar is not None:
        generic |= {grammar.terminal, grammar.start}
        if grammar.is_intermediate(symbol):
            return False
    return symbol not in generic and not symbol.endswith(settings.complex_suffix)


def extract_labels(
    tree: Tree,
    grammar: Optional[Grammar] = None,
    terminal_ids: Optional[Iterable[int]] = None,
) -> Dict[int, str]:
    """
    Label of every segment: its lowest ancestor that names an object or part.

    Segments under no such ancestor, and ids in ``terminal_ids`` the tree does not
    reach, get ``"none"``.

    Args:
        tree: Parse tree or ground-truth tree
        grammar: Grammar used to recognize intermediates
        terminal_ids: All segment ids of the scene

    Returns:
        Map of segment id to label
    """
    labels: Dict[int, str] = {i: NONE_LABEL for i in (terminal_ids or ())}

    def walk(node: Tree, current: str) -> None:
        if isinstance(node, int):
            labels[node] = current
            return
        if isinstance(node, ParseNode) and node.is_leaf:
            labels[node.segment_id] = current
            return
        symbol = node.symbol if isinstance(node, ParseNode) else node.label
        if is_label_symbol(symbol, grammar):
            current = symbol
        for child in node.children:
            walk(child, current)

    walk(tree, NONE_LABEL)
    return labels
