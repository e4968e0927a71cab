"""
Per-rule cost models: g(s, r) and the categorical priors over rule families.
"""
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Dict, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from src.features.entity import Entity
from src.features.extractor import f
from src.features.schema import FeatureSchema
from src.grammar.symbols import Rule, RuleKind
from src.model.gaussian import GaussianParams
from src.scene.model import Scene
from src.scene.stats import SegmentStats, merge_stats, plane_residual
from src.utils.config import settings
from src.utils.errors import ModelError


class ModelVariant(str, Enum):
    GAUSSIAN = "gaussian"
    PLANEFIT = "planefit"
    GOAL = "goal"


def variant_for(rule: Rule) -> ModelVariant:
    """Goal rules pay the unspanned penalty, plane-forming rules a plane fit, the rest a Gaussian."""
    if rule.kind == RuleKind.GOAL:
        return ModelVariant.GOAL
    if rule.kind == RuleKind.SEGMENTATION and rule.lhs == settings.plane_symbol:
        return ModelVariant.PLANEFIT
    return ModelVariant.GAUSSIAN


@dataclass(frozen=True, eq=False)
class RuleModel:
    variant: ModelVariant
    prior: float = 1.0
    train_count: int = 0
    gaussian: Optional[GaussianParams] = None
    k: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.prior <= 1.0:
            raise ModelError(f"prior {self.prior} outside (0, 1]")
        if self.variant == ModelVariant.GAUSSIAN and self.gaussian is None:
            raise ModelError("gaussian model without parameters")
        if self.variant == ModelVariant.GOAL and (self.k is None or self.k <= 0):
            raise ModelError(f"goal penalty k must be positive, got {self.k}")

    @classmethod
    def goal(cls, k: Optional[float] = None, train_count: int = 0) -> "RuleModel":
        return cls(ModelVariant.GOAL, k=settings.goal_penalty_k if k is None else k, train_count=train_count)


class RuleScore(NamedTuple):
    cost: float
    clamped: bool


def score_rule(
    children: Sequence[Entity],
    rule: Rule,
    model: RuleModel,
    scene: Optional[Scene] = None,
    merged: Optional[SegmentStats] = None,
    unspanned: int = 0,
    schema: Optional[FeatureSchema] = None,
) -> RuleScore:
    """
    Cost of applying ``rule`` to ``children``, with a flag telling whether it was clamped.

    Gaussian rules cost -log(prior * density(f(children))) floored at 0; plane rules
    cost -log(prior) plus the plane-fit residual of the merged points; goal rules
    cost k per terminal the goal leaves unspanned.

    Raises:
        ModelError: The model does not fit the rule or the density is not finite.
    """
    if model.variant != variant_for(rule):
        raise ModelError(f"model variant {model.variant.value} does not match rule '{rule}'")
    if model.variant == ModelVariant.GOAL:
        return RuleScore(model.k * unspanned, False)
    if model.variant == ModelVariant.PLANEFIT:
        if merged is None:
            merged = _merge(children)
        return RuleScore(-math.log(model.prior) + plane_residual(merged), False)

    features = f(children, scene, schema, expected_length=model.gaussian.dim)
    log_p = math.log(model.prior) + model.gaussian.logpdf(features.values)
    if not np.isfinite(log_p):
        raise ModelError(f"non-finite density for rule '{rule}'")
    if log_p > 0.0:
        return RuleScore(0.0, True)
    return RuleScore(-log_p, False)


def rule_cost(
    children: Sequence[Entity],
    rule: Rule,
    model: RuleModel,
    scene: Optional[Scene] = None,
    merged: Optional[SegmentStats] = None,
    unspanned: int = 0,
    schema: Optional[FeatureSchema] = None,
) -> float:
    """Non-negative cost of one rule application (see ``score_rule``)."""
    return score_rule(children, rule, model, scene, merged, unspanned, schema).cost


def _merge(children: Sequence[Entity]) -> SegmentStats:
    return reduce(merge_stats, (c.stats for c in children))


def fit_priors(counts: Mapping[Rule, int], floor: Optional[float] = None) -> Dict[Rule, float]:
    """
    Categorical prior of each rule within its LHS family.

    prior(r) = count(r) / sum of counts of rules sharing r's LHS. Rules with a zero
    count take ``floor`` as their weight before normalizing.
    """
    floor = settings.prior_floor if floor is None else floor
    families: Dict[str, list] = defaultdict(list)
    for rule in sorted(counts):
        families[rule.lhs].append(rule)
    priors: Dict[Rule, float] = {}
    for rules in families.values():
        weights = [float(counts[r]) if counts[r] > 0 else floor for r in rules]
        total = math.fsum(weights)
        for rule, weight in zip(rules, weights):
            priors[rule] = weight / total
    return priors
