"""
Composition of two trained sub-grammars into one.
"""
import math
from collections import defaultdict
from dataclasses import replace
from typing import Dict, List, Optional

import numpy as np

from src.grammar.symbols import Rule
from src.model.rule_model import ModelVariant, RuleModel
from src.model.trained import TrainedGrammar
from src.utils.config import settings
from src.utils.errors import ConflictingModelsError, FeatureSchemaError
from src.utils.logging import get_logger

logger = get_logger("model.compose")


def _same_model(a: RuleModel, b: RuleModel) -> bool:
    if a.variant != b.variant:
        return False
    if a.variant == ModelVariant.GOAL:
        return a.k == b.k
    if a.variant == ModelVariant.GAUSSIAN:
        return (
            np.array_equal(a.gaussian.mu, b.gaussian.mu)
            and np.array_equal(a.gaussian.sigma, b.gaussian.sigma)
            and a.gaussian.reg_epsilon == b.gaussian.reg_epsilon
        )
    return True


def compose(g1: TrainedGrammar, g2: TrainedGrammar, prior_floor: Optional[float] = None) -> TrainedGrammar:
    """
    Merge two trained grammars.

    Rules found in only one grammar keep their model unchanged. A rule found in both
    must carry the same parameters; the first grammar's model is kept. An LHS family
    whose rule set differs between the two is re-weighted by training frequency: each
    rule weighs prior * family count in the grammar it comes from (the floor when that
    is zero) and the weights are normalized. Families that gain nothing keep the
    priors of the grammar they come from.

    Args:
        g1: Base grammar
        g2: Donor grammar
        prior_floor: Weight of rules with no training count

    Returns:
        Composed grammar

    Raises:
        ConflictingModelsError: A shared rule has different parameters in each grammar.
        FeatureSchemaError: The grammars were trained on different feature schemas.
    """
    floor = settings.prior_floor if prior_floor is None else prior_floor
    if g1.rules and g2.rules and g1.schema_id != g2.schema_id:
        raise FeatureSchemaError(f"cannot compose schema '{g1.schema_id}' with '{g2.schema_id}'")

    for rule in set(g1.models) & set(g2.models):
        if not _same_model(g1.models[rule], g2.models[rule]):
            logger.error(f"Rule '{rule}' carries different models in the composed grammars")
            raise ConflictingModelsError(f"conflicting models for rule '{rule}'")

    grammar = g1.grammar.union(g2.grammar)
    families: Dict[str, List[Rule]] = defaultdict(list)
    for rule in grammar.rules:
        families[rule.lhs].append(rule)

    models: Dict[Rule, RuleModel] = {}
    for lhs, rules in families.items():
        in_1 = {r for r in rules if r in g1.models}
        in_2 = {r for r in rules if r in g2.models}
        gained = in_1 and in_2 and in_1 != in_2
        for rule in rules:
            models[rule] = g1.models[rule] if rule in g1.models else g2.models[rule]
        if not gained:
            continue

        count_1, count_2 = g1.family_count(lhs), g2.family_count(lhs)
        weights = {}
        for rule in rules:
            if models[rule].variant == ModelVariant.GOAL:
                continue
            if rule in in_1:
                weight = g1.models[rule].prior * count_1
            else:
                weight = g2.models[rule].prior * count_2
            weights[rule] = weight if weight > 0 else floor
        total = math.fsum(weights.values())
        for rule, weight in weights.items():
            models[rule] = replace(models[rule], prior=weight / total)
        logger.info(f"Family '{lhs}' gained {len(in_2 - in_1)} rules; priors renormalized")

    composed = TrainedGrammar(grammar=grammar, models=models, schema_id=g1.schema_id if g1.rules else g2.schema_id)
    logger.info(f"Composed grammar has {len(composed.rules)} rules")
    return composed
