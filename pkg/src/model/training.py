"""
Learning rule models from labelled parse trees.
"""
import time
from collections import Counter, defaultdict
from typing import Dict, List, Optional, Sequence

from src.features.entity import Entity, make_entity
from src.features.extractor import FeatureVector, f
from src.features.schema import get_schema
from src.grammar.grammar import Grammar, derive_tree
from src.grammar.symbols import Rule
from src.grammar.tree import ParseNode
from src.model.gaussian import fit_gaussian
from src.model.rule_model import ModelVariant, RuleModel, fit_priors, variant_for
from src.model.trained import TrainedGrammar
from src.scene.model import Scene
from src.scene.tree import GroundTruthTree
from src.utils.config import settings
from src.utils.errors import NotDerivableError, SchemaError
from src.utils.logging import get_logger

logger = get_logger("model.training")


def _collect(
    node: ParseNode,
    grammar: Grammar,
    scene: Scene,
    schema,
    counts: Counter,
    samples: Dict[Rule, List[FeatureVector]],
) -> Entity:
    if node.is_leaf:
        return Entity(name=node.symbol, span=node.span, stats=scene.by_id[node.segment_id].stats)
    children = [_collect(c, grammar, scene, schema, counts, samples) for c in node.children]
    counts[node.rule] += 1
    if variant_for(node.rule) == ModelVariant.GAUSSIAN:
        samples[node.rule].append(f(children, scene, schema))
    return make_entity(node.symbol, children, grammar.is_intermediate(node.symbol))


def prune_grammar(grammar: Grammar, keep: set) -> Grammar:
    """Drop rules outside ``keep`` and, repeatedly, rules whose LHS nothing uses any more."""
    rules = [r for r in grammar.rules if r in keep]
    while True:
        used = {s for r in rules for s in r.rhs} | {grammar.start}
        kept = [r for r in rules if r.lhs in used]
        if len(kept) == len(rules):
            break
        rules = kept
    kinds = {name: sym.kind for name, sym in grammar.symbols.items()}
    return Grammar.from_rules(rules, start=grammar.start, kinds=kinds)


def train(
    trees: Sequence[GroundTruthTree],
    scenes: Sequence[Scene],
    grammar: Grammar,
    k: Optional[float] = None,
    schema_id: Optional[str] = None,
) -> TrainedGrammar:
    """
    Fit every rule's model in one pass over a labelled forest.

    Each tree is re-derived in the binarized grammar; every application site of a
    Gaussian rule contributes its feature vector, and every application counts toward
    its rule's prior. Rules never applied are pruned.

    Args:
        trees: Ground-truth trees
        scenes: The scene of each tree, in the same order
        grammar: Binarized grammar to train
        k: Goal penalty per unspanned terminal
        schema_id: Feature schema to fit on

    Returns:
        Trained grammar

    Raises:
        NotDerivableError: A tree node cannot be derived with the grammar.
    """
    if len(trees) != len(scenes):
        raise SchemaError(f"got {len(trees)} trees for {len(scenes)} scenes")
    schema = get_schema(schema_id)
    started = time.perf_counter()

    counts: Counter = Counter()
    samples: Dict[Rule, List[FeatureVector]] = defaultdict(list)
    for index, (tree, scene) in enumerate(zip(trees, scenes)):
        unknown = sorted(set(tree.leaves()) - set(scene.terminal_ids))
        if unknown:
            raise SchemaError(f"tree {index}: leaf ids {unknown} are not segments of scene '{scene.name}'")
        try:
            derivation = derive_tree(tree, grammar, scene)
        except NotDerivableError as e:
            logger.error(f"Tree {index} ({scene.name}) is not derivable: {e}")
            raise NotDerivableError(f"tree {index} ({scene.name}): {e}") from e
        _collect(derivation, grammar, scene, schema, counts, samples)

    unseen = [r for r in grammar.rules if counts[r] == 0]
    if unseen:
        logger.warning(f"Pruning {len(unseen)} rules never applied in training: {', '.join(map(str, unseen))}")
    pruned = prune_grammar(grammar, {r for r in grammar.rules if counts[r] > 0})

    goal_k = settings.goal_penalty_k if k is None else k
    priors = fit_priors({r: counts[r] for r in pruned.rules if variant_for(r) != ModelVariant.GOAL})
    models: Dict[Rule, RuleModel] = {}
    for rule in pruned.rules:
        variant = variant_for(rule)
        if variant == ModelVariant.GOAL:
            models[rule] = RuleModel.goal(goal_k, train_count=counts[rule])
        elif variant == ModelVariant.PLANEFIT:
            models[rule] = RuleModel(variant, prior=priors[rule], train_count=counts[rule])
        else:
            models[rule] = RuleModel(
                variant,
                prior=priors[rule],
                train_count=counts[rule],
                gaussian=fit_gaussian(samples[rule]),
            )

    elapsed = time.perf_counter() - started
    logger.info(
        f"Trained {len(models)} rules on {len(trees)} trees "
        f"({sum(counts.values())} application sites) in {elapsed:.3f}s"
    )
    return TrainedGrammar(grammar=pruned, models=models, schema_id=schema.schema_id)
