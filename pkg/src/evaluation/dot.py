"""
Graphviz DOT export of parse trees.
"""
from pathlib import Path
from typing import Optional, Union

import graphviz

from src.grammar.tree import ParseNode
from src.scene.tree import GroundTruthTree
from src.utils.logging import get_logger

logger = get_logger("evaluation.dot")

Tree = Union[ParseNode, GroundTruthTree]


def _label(node) -> str:
    if isinstance(node, int):
        return str(node)
    if isinstance(node, GroundTruthTree):
        return node.label
    if node.is_leaf:
        return str(node.segment_id)
    return f"{node.symbol}\\n{node.cost:.4g}"


def to_digraph(tree: Tree, name: str = "parse") -> graphviz.Digraph:
    """One DOT node per tree node, numbered in pre-order; edges run parent to child."""
    g = graphviz.Digraph(name)
    counter = 0
    stack = [(tree, None)]
    while stack:
        node, parent = stack.pop()
        node_id = f"n{counter}"
        counter += 1
        shape = "box" if isinstance(node, int) or (isinstance(node, ParseNode) and node.is_leaf) else "ellipse"
        g.node(node_id, label=_label(node), shape=shape)
        if parent is not None:
            g.edge(parent, node_id)
        if not isinstance(node, int):
            stack.extend((child, node_id) for child in reversed(node.children))
    return g


def export_dot(tree: Tree, path: Optional[Union[str, Path]] = None, name: str = "parse") -> str:
    """
    DOT source of a tree; nodes show symbol and cost, leaves show segment ids.

    Args:
        tree: Parse tree or ground-truth tree
        path: Also write the source to this file
        name: Graph name

    Returns:
        DOT source text
    """
    source = to_digraph(tree, name).source
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(source, encoding="utf-8")
        logger.info(f"Wrote DOT tree to {path}")
    return source
