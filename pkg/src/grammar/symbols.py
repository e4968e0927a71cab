"""
Symbols and production rules of the scene grammar.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Tuple

from src.utils.config import settings


class SymbolKind(str, Enum):
    TERMINAL = "terminal"
    NONTERMINAL = "nonterminal"
    INTERMEDIATE = "intermediate"
    START = "start"


class RuleKind(str, Enum):
    SEGMENTATION = "segmentation"
    OBJECT_FORMATION = "object-formation"
    OBJECT_GROUPING = "object-grouping"
    GOAL = "goal"


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: SymbolKind


@dataclass(frozen=True, eq=False)
class Rule:
    """
    A production ``lhs -> rhs``.

    The RHS is a multiset: two rules are equal when their LHS and sorted RHS agree.
    ``rhs`` keeps the order the rule was first listed in, which binarization uses to
    name intermediates.
    """

    lhs: str
    rhs: Tuple[str, ...]
    kind: RuleKind = field(default=RuleKind.OBJECT_FORMATION)

    def __post_init__(self):
        object.__setattr__(self, "rhs", tuple(self.rhs))
        if not self.rhs:
            raise ValueError(f"rule for {self.lhs} has an empty right-hand side")

    @property
    def key(self) -> Tuple[str, Tuple[str, ...]]:
        return self.lhs, tuple(sorted(self.rhs))

    @property
    def arity(self) -> int:
        return len(self.rhs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Rule) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "Rule") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return f"{self.lhs} -> {' '.join(self.rhs)}"


def classify_rule(
    lhs: str,
    rhs: Iterable[str],
    start: Optional[str] = None,
) -> RuleKind:
    """
    Assign a rule family from symbol names.

    The start symbol makes a goal rule, an ``...Complex`` LHS a grouping rule, a RHS
    containing the terminal or plane symbol a segmentation rule; anything else forms
    an object from its parts.
    """
    start = start or settings.start_symbol
    rhs = tuple(rhs)
    if lhs == start:
        return RuleKind.GOAL
    if lhs.endswith(settings.complex_suffix):
        return RuleKind.OBJECT_GROUPING
    if settings.terminal_symbol in rhs or settings.plane_symbol in rhs:
        return RuleKind.SEGMENTATION
    return RuleKind.OBJECT_FORMATION


def make_rule(lhs: str, rhs: Iterable[str], start: Optional[str] = None) -> Rule:
    rhs = tuple(rhs)
    return Rule(lhs=lhs, rhs=rhs, kind=classify_rule(lhs, rhs, start))
