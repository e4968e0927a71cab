"""
Grammar files: symbols, rules and optional per-rule model blocks as JSON.
"""
from pathlib import Path
from typing import Annotated, Any, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.grammar.grammar import Grammar
from src.grammar.symbols import Rule, RuleKind, SymbolKind
from src.model.gaussian import GaussianParams
from src.model.rule_model import ModelVariant, RuleModel
from src.model.trained import TrainedGrammar
from src.scene.io import describe_validation_error, read_json, write_json
from src.utils.config import settings
from src.utils.errors import ModelError, SchemaError
from src.utils.logging import get_logger

logger = get_logger("model.store")


class GaussianBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["gaussian"]
    mu: List[float] = Field(min_length=1)
    sigma: List[List[float]]
    prior: float = Field(gt=0.0, le=1.0)
    count: int = Field(default=0, ge=0)
    reg_epsilon: float = Field(default=1e-6, gt=0.0)


class PlaneFitBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["planefit"]
    prior: float = Field(gt=0.0, le=1.0)
    count: int = Field(default=0, ge=0)


class GoalBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["goal"]
    k: float = Field(gt=0.0)
    count: int = Field(default=0, ge=0)


ModelBlock = Annotated[Union[GaussianBlock, PlaneFitBlock, GoalBlock], Field(discriminator="type")]


class SymbolRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    kind: SymbolKind


class RuleRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lhs: str = Field(min_length=1)
    rhs: List[str] = Field(min_length=1)
    kind: RuleKind
    model: Optional[ModelBlock] = None


class GrammarFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    start: str = Field(default="S", min_length=1)
    schema_id: Optional[str] = None
    symbols: List[SymbolRecord] = Field(default_factory=list)
    rules: List[RuleRecord]


def _validate(data: Any) -> GrammarFile:
    try:
        return GrammarFile.model_validate(data)
    except ValidationError as e:
        raise SchemaError(describe_validation_error(e)) from e


def _grammar(record: GrammarFile) -> Grammar:
    kinds = {}
    for k, sym in enumerate(record.symbols):
        if sym.name in kinds:
            raise SchemaError(f"symbols.{k}.name: duplicate symbol '{sym.name}'")
        kinds[sym.name] = sym.kind
    rules = [Rule(lhs=r.lhs, rhs=tuple(r.rhs), kind=r.kind) for r in record.rules]
    if len(set(rules)) != len(rules):
        raise SchemaError("rules: a rule is listed twice")
    return Grammar.from_rules(rules, start=record.start, kinds=kinds)


def _model(block: ModelBlock) -> RuleModel:
    if isinstance(block, GoalBlock):
        return RuleModel.goal(block.k, train_count=block.count)
    if isinstance(block, PlaneFitBlock):
        return RuleModel(ModelVariant.PLANEFIT, prior=block.prior, train_count=block.count)
    return RuleModel(
        ModelVariant.GAUSSIAN,
        prior=block.prior,
        train_count=block.count,
        gaussian=GaussianParams(mu=block.mu, sigma=block.sigma, reg_epsilon=block.reg_epsilon),
    )


def grammar_from_dict(data: Any) -> Grammar:
    """Grammar part of a grammar document; model blocks are ignored."""
    return _grammar(_validate(data))


def trained_grammar_from_dict(data: Any) -> TrainedGrammar:
    """
    Grammar document with a model block on every rule.

    Raises:
        SchemaError: The document is malformed or a rule lacks its model.
    """
    record = _validate(data)
    grammar = _grammar(record)
    models = {}
    for k, rec in enumerate(record.rules):
        if rec.model is None:
            raise SchemaError(f"rules.{k}.model: rule '{rec.lhs} -> {' '.join(rec.rhs)}' has no model")
        models[Rule(lhs=rec.lhs, rhs=tuple(rec.rhs), kind=rec.kind)] = _model(rec.model)
    try:
        return TrainedGrammar(grammar=grammar, models=models, schema_id=record.schema_id or settings.schema_id)
    except ModelError as e:
        raise SchemaError(f"rules: {e}") from e


def _symbols(grammar: Grammar) -> List[dict]:
    return [{"name": s.name, "kind": s.kind.value} for s in grammar.symbols.values()]


def _model_block(model: RuleModel) -> dict:
    if model.variant == ModelVariant.GOAL:
        return {"type": "goal", "k": model.k, "count": model.train_count}
    if model.variant == ModelVariant.PLANEFIT:
        return {"type": "planefit", "prior": model.prior, "count": model.train_count}
    return {
        "type": "gaussian",
        "mu": model.gaussian.mu.tolist(),
        "sigma": model.gaussian.sigma.tolist(),
        "prior": model.prior,
        "count": model.train_count,
        "reg_epsilon": model.gaussian.reg_epsilon,
    }


def grammar_to_dict(grammar: Union[Grammar, TrainedGrammar]) -> dict:
    """Serialize a grammar, with model blocks when it is trained."""
    trained = grammar if isinstance(grammar, TrainedGrammar) else None
    base = trained.grammar if trained else grammar
    rules = []
    for rule in base.rules:
        entry = {"lhs": rule.lhs, "rhs": list(rule.rhs), "kind": rule.kind.value}
        if trained:
            entry["model"] = _model_block(trained.model(rule))
        rules.append(entry)
    data = {"start": base.start}
    if trained:
        data["schema_id"] = trained.schema_id
    data["symbols"] = _symbols(base)
    data["rules"] = rules
    return data


def load_grammar(path: Union[str, Path]) -> Grammar:
    """
    Load the rules of a grammar file, trained or not.

    Args:
        path: Path to the grammar JSON

    Returns:
        Validated grammar
    """
    path = Path(path)
    try:
        grammar = grammar_from_dict(read_json(path))
    except SchemaError as e:
        logger.error(f"Invalid grammar file {path}: {e}")
        raise
    logger.info(f"Loaded grammar {path}: {len(grammar.rules)} rules")
    return grammar


def load_trained_grammar(path: Union[str, Path]) -> TrainedGrammar:
    """
    Load a grammar file whose rules all carry model blocks.

    Args:
        path: Path to the grammar JSON

    Returns:
        Trained grammar
    """
    path = Path(path)
    try:
        tg = trained_grammar_from_dict(read_json(path))
    except SchemaError as e:
        logger.error(f"Invalid trained grammar {path}: {e}")
        raise
    logger.info(f"Loaded trained grammar {path}: {len(tg.rules)} rules, schema {tg.schema_id}")
    return tg


def save_grammar(grammar: Union[Grammar, TrainedGrammar], path: Union[str, Path]) -> Path:
    return write_json(grammar_to_dict(grammar), path)
