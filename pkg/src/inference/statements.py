"""
Parser state shared by every search: statements, forests and results.
"""
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from src.features.entity import Entity, make_entity
from src.grammar.symbols import Rule, RuleKind
from src.grammar.tree import ParseNode
from src.model.trained import TrainedGrammar
from src.scene.model import Scene
from src.utils.config import settings

StatementKey = Tuple


@dataclass(frozen=True, eq=False)
class Statement:
    """
    A derived symbol over a connected span, with the cheapest derivation found for it.

    Two statements with the same ``key`` denote the same entity: the key is
    (symbol, span) for ordinary symbols and (symbol, leaf-part assignment) for
    intermediates.
    """

    symbol: str
    span: FrozenSet[int]
    entity: Entity
    cost: float = 0.0
    rule: Optional[Rule] = None
    children: Tuple["Statement", ...] = ()
    rule_cost: float = 0.0
    clamped: bool = False
    segment_id: Optional[int] = None

    @cached_property
    def key(self) -> StatementKey:
        if self.entity.parts:
            return self.symbol, tuple(p.sort_key for p in self.entity.parts)
        return self.symbol, tuple(sorted(self.span))

    @property
    def is_terminal(self) -> bool:
        return self.segment_id is not None


@dataclass(frozen=True, eq=False)
class Forest:
    """A beam state: disjoint partial trees; terminals not yet used are roots of their own."""

    roots: Tuple[Statement, ...]

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(sorted(self.roots, key=lambda s: s.key)))

    @cached_property
    def key(self) -> FrozenSet[StatementKey]:
        return frozenset(r.key for r in self.roots)

    @cached_property
    def total_cost(self) -> float:
        return math.fsum(r.cost for r in self.roots)

    def replace(self, used: Sequence[Statement], made: Statement) -> "Forest":
        used_keys = {u.key for u in used}
        return Forest(tuple(r for r in self.roots if r.key not in used_keys) + (made,))


@dataclass
class ParseStats:
    expansions: int = 0
    queue_peak: int = 0
    wall_time: float = 0.0
    max_derived_cost: float = 0.0
    steps: int = 0

    def as_dict(self) -> Dict[str, float]:
        return {
            "expansions": self.expansions,
            "queue_peak": self.queue_peak,
            "wall_time": self.wall_time,
            "max_derived_cost": self.max_derived_cost,
            "steps": self.steps,
        }


@dataclass(frozen=True)
class ParseResult:
    tree: ParseNode
    cost: float
    unspanned: int
    algorithm: str
    clamped: bool
    stats: ParseStats = field(default_factory=ParseStats)


@dataclass(frozen=True)
class Exhausted:
    """KLD stopped without deriving a goal: ``reason`` is "budget" or "no_goal"."""

    reason: str
    forest: Tuple[ParseNode, ...]
    stats: ParseStats = field(default_factory=ParseStats)


class ParseContext:
    """
    One scene paired with a trained grammar: rule indexes and rule application.

    Args:
        scene: Scene to parse
        tg: Trained grammar
    """

    def __init__(self, scene: Scene, tg: TrainedGrammar):
        self.scene = scene
        self.tg = tg
        self.grammar = tg.grammar
        self.unary: Dict[str, List[Rule]] = defaultdict(list)
        self.binary: Dict[str, List[Tuple[Rule, str]]] = defaultdict(list)
        self.goal_rules: Dict[str, Rule] = {}
        for rule in self.grammar.rules:
            if rule.kind == RuleKind.GOAL:
                if rule.arity == 1:
                    self.goal_rules[rule.rhs[0]] = rule
            elif rule.arity == 1:
                self.unary[rule.rhs[0]].append(rule)
            else:
                a, b = rule.rhs
                self.binary[a].append((rule, b))
                if a != b:
                    self.binary[b].append((rule, a))

    @cached_property
    def terminals(self) -> Tuple[Statement, ...]:
        symbol = self.grammar.terminal
        return tuple(
            Statement(
                symbol=symbol,
                span=frozenset([seg.id]),
                entity=Entity(name=symbol, span=frozenset([seg.id]), stats=seg.stats),
                segment_id=seg.id,
            )
            for seg in self.scene.segments
        )

    def applicable(self, rule: Rule, items: Sequence[Statement]) -> bool:
        """Spans are disjoint and, for a binary rule, joined by at least one edge."""
        if sorted(i.symbol for i in items) != sorted(rule.rhs):
            return False
        if len(items) == 1:
            return True
        a, b = items
        if a.span & b.span:
            return False
        return self.scene.touches(a.span, b.span)

    def apply(self, rule: Rule, items: Sequence[Statement]) -> Statement:
        """Statement produced by applying ``rule`` to ``items``."""
        entities = [i.entity for i in items]
        entity = make_entity(rule.lhs, entities, self.grammar.is_intermediate(rule.lhs))
        score = self.tg.score(rule, entities, self.scene, entity.stats)
        return Statement(
            symbol=rule.lhs,
            span=entity.span,
            entity=entity,
            cost=score.cost + math.fsum(i.cost for i in items),
            rule=rule,
            children=tuple(items),
            rule_cost=score.cost,
            clamped=score.clamped or any(i.clamped for i in items),
        )

    def goal(self, stmt: Statement) -> Optional[Statement]:
        """Start-symbol statement over ``stmt``, paying for every terminal it leaves out."""
        rule = self.goal_rules.get(stmt.symbol)
        if rule is None:
            return None
        unspanned = len(self.scene) - len(stmt.span)
        score = self.tg.score(rule, [stmt.entity], self.scene, stmt.entity.stats, unspanned)
        return Statement(
            symbol=rule.lhs,
            span=stmt.span,
            entity=Entity(name=rule.lhs, span=stmt.span, stats=stmt.entity.stats),
            cost=stmt.cost + score.cost,
            rule=rule,
            children=(stmt,),
            rule_cost=score.cost,
            clamped=stmt.clamped,
        )

    def empty_goal(self) -> ParseNode:
        """Childless start node that leaves every terminal unspanned."""
        goal = next(iter(self.goal_rules.values()), None)
        k = self.tg.model(goal).k if goal is not None else settings.goal_penalty_k
        cost = k * len(self.scene)
        return ParseNode(symbol=self.grammar.start, span=frozenset(), rule=goal, cost=cost, rule_cost=cost)

    def result(self, goal: Statement, algorithm: str, stats: ParseStats) -> ParseResult:
        return ParseResult(
            tree=to_parse_tree(goal),
            cost=goal.cost,
            unspanned=len(self.scene) - len(goal.span),
            algorithm=algorithm,
            clamped=goal.clamped,
            stats=stats,
        )


def to_parse_tree(stmt: Statement) -> ParseNode:
    return ParseNode(
        symbol=stmt.symbol,
        span=stmt.span,
        children=tuple(to_parse_tree(c) for c in stmt.children),
        rule=stmt.rule,
        segment_id=stmt.segment_id,
        cost=stmt.cost,
        rule_cost=stmt.rule_cost,
    )


def greedy_forest(statements: Sequence[Statement]) -> Tuple[Statement, ...]:
    """Disjoint statements picked largest span first, cheapest first among equals."""
    picked: List[Statement] = []
    covered: set = set()
    for stmt in sorted(statements, key=lambda s: (-len(s.span), s.cost, s.key)):
        if stmt.span & covered:
            continue
        picked.append(stmt)
        covered |= stmt.span
    return tuple(picked)
