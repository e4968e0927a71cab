"""Rule cost models, training and grammar files."""
from src.model.compose import compose
from src.model.gaussian import GaussianParams, fit_gaussian
from src.model.rule_model import ModelVariant, RuleModel, RuleScore, fit_priors, rule_cost, score_rule, variant_for
from src.model.store import load_grammar, load_trained_grammar, save_grammar
from src.model.trained import TrainedGrammar, annotate_tree, tree_cost
from src.model.training import train

__all__ = [
    "GaussianParams",
    "ModelVariant",
    "RuleModel",
    "RuleScore",
    "TrainedGrammar",
    "annotate_tree",
    "compose",
    "fit_gaussian",
    "fit_priors",
    "load_grammar",
    "load_trained_grammar",
    "rule_cost",
    "save_grammar",
    "score_rule",
    "train",
    "tree_cost",
    "variant_for",
]
