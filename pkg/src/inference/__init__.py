"""Parsers: exact best-first search, stochastic beam search and an exhaustive oracle."""
from src.inference.beam import parse_beam
from src.inference.exhaustive import parse_exhaustive
from src.inference.kld import parse_kld
from src.inference.parser import ALGORITHMS, parse_scene
from src.inference.statements import Exhausted, Forest, ParseContext, ParseResult, ParseStats, Statement
from src.inference.subsets import connected_subsets

__all__ = [
    "ALGORITHMS",
    "Exhausted",
    "Forest",
    "ParseContext",
    "ParseResult",
    "ParseStats",
    "Statement",
    "connected_subsets",
    "parse_beam",
    "parse_exhaustive",
    "parse_kld",
    "parse_scene",
]
