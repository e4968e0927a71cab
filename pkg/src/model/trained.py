"""
A grammar together with one cost model per rule.
"""
import math
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Mapping, Optional, Sequence, Tuple

from src.features.entity import Entity, make_entity
from src.features.schema import FeatureSchema, get_schema
from src.grammar.grammar import Grammar
from src.grammar.symbols import Rule
from src.grammar.tree import ParseNode
from src.model.rule_model import ModelVariant, RuleModel, RuleScore, score_rule, variant_for
from src.scene.model import Scene
from src.scene.stats import SegmentStats
from src.utils.config import settings
from src.utils.errors import FeatureSchemaError, ModelError


@dataclass(frozen=True, eq=False)
class TrainedGrammar:
    """Grammar, per-rule models and the feature schema the models were fitted on."""

    grammar: Grammar
    models: Mapping[Rule, RuleModel]
    schema_id: str = "geom-v1"

    def __post_init__(self):
        get_schema(self.schema_id)
        for rule in self.grammar.rules:
            model = self.models.get(rule)
            if model is None:
                raise ModelError(f"rule '{rule}' has no model")
            if model.variant != variant_for(rule):
                raise ModelError(f"rule '{rule}' carries a {model.variant.value} model")
        extra = set(self.models) - set(self.grammar.rules)
        if extra:
            raise ModelError(f"models for rules not in the grammar: {sorted(str(r) for r in extra)}")
        for lhs, total in self.prior_totals().items():
            if abs(total - 1.0) > 1e-9:
                raise ModelError(f"priors of '{lhs}' sum to {total}, not 1")

    @cached_property
    def schema(self) -> FeatureSchema:
        return get_schema(self.schema_id)

    def prior_totals(self) -> Dict[str, float]:
        totals: Dict[str, list] = defaultdict(list)
        for rule, model in self.models.items():
            if model.variant != ModelVariant.GOAL:
                totals[rule.lhs].append(model.prior)
        return {lhs: math.fsum(p) for lhs, p in totals.items()}

    def model(self, rule: Rule) -> RuleModel:
        try:
            return self.models[rule]
        except KeyError:
            raise ModelError(f"rule '{rule}' has no model") from None

    def family_count(self, lhs: str) -> int:
        """Training applications of all rules rewriting ``lhs``."""
        return sum(m.train_count for r, m in self.models.items() if r.lhs == lhs)

    @property
    def rules(self) -> Tuple[Rule, ...]:
        return self.grammar.rules

    def score(
        self,
        rule: Rule,
        children: Sequence[Entity],
        scene: Optional[Scene] = None,
        merged: Optional[SegmentStats] = None,
        unspanned: int = 0,
    ) -> RuleScore:
        return score_rule(children, rule, self.model(rule), scene, merged, unspanned, self.schema)

    def check_schema(self, schema_id: Optional[str] = None) -> None:
        expected = schema_id or settings.schema_id
        if expected != self.schema_id:
            raise FeatureSchemaError(f"grammar was trained with schema '{self.schema_id}', not '{expected}'")


def tree_entity(node: ParseNode, grammar: Grammar, scene: Scene) -> Entity:
    """Entity of a parse-tree node, rebuilt from the scene's segment statistics."""
    if node.is_leaf:
        return Entity(name=node.symbol, span=node.span, stats=scene.by_id[node.segment_id].stats)
    children = [tree_entity(c, grammar, scene) for c in node.children]
    return make_entity(node.symbol, children, grammar.is_intermediate(node.symbol))


def annotate_tree(tree: ParseNode, tg: TrainedGrammar, scene: Scene) -> Tuple[ParseNode, bool]:
    """
    Recompute every node's rule cost and subtree cost.

    Returns:
        The annotated tree and whether any rule cost was clamped

    Raises:
        ModelError: A node's rule has no model.
    """
    clamped = False

    def walk(node: ParseNode) -> Tuple[ParseNode, Entity]:
        nonlocal clamped
        if node.is_leaf:
            entity = Entity(name=node.symbol, span=node.span, stats=scene.by_id[node.segment_id].stats)
            return node, entity
        if node.rule is None:
            raise ModelError(f"node '{node.symbol}' over {sorted(node.span)} has no rule")
        walked = [walk(c) for c in node.children]
        children = tuple(n for n, _ in walked)
        entities = [e for _, e in walked]
        entity = make_entity(node.symbol, entities, tg.grammar.is_intermediate(node.symbol))
        unspanned = len(scene) - len(node.span)
        score = tg.score(node.rule, entities, scene, entity.stats, unspanned)
        clamped = clamped or score.clamped
        cost = score.cost + sum(c.cost for c in children)
        return node.with_costs(score.cost, cost, children), entity

    annotated, _ = walk(tree)
    return annotated, clamped


def tree_cost(tree: ParseNode, tg: TrainedGrammar, scene: Scene) -> float:
    """Sum of the rule costs of every nonterminal node, including the start symbol."""
    annotated, _ = annotate_tree(tree, tg, scene)
    return math.fsum(n.rule_cost for n in annotated.internal_nodes())
