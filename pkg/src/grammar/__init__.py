"""Scene grammar symbols, rules and derivations."""
from src.grammar.grammar import (
    Grammar,
    binarize,
    build_grammar,
    derive_tree,
    extract_rules,
    format_rules,
    leaf_parts,
)
from src.grammar.symbols import Rule, RuleKind, Symbol, SymbolKind, classify_rule, make_rule
from src.grammar.tree import ParseNode, ParseTree

__all__ = [
    "Grammar",
    "ParseNode",
    "ParseTree",
    "Rule",
    "RuleKind",
    "Symbol",
    "SymbolKind",
    "binarize",
    "build_grammar",
    "classify_rule",
    "derive_tree",
    "extract_rules",
    "format_rules",
    "leaf_parts",
    "make_rule",
]
