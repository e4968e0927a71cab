"""
Cross-validated segment labeling over a generated corpus.
"""
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from src.evaluation.labels import extract_labels
from src.evaluation.metrics import LabelReport, RecoveryReport, object_recovery, precision_recall
from src.grammar.grammar import Grammar, build_grammar, derive_tree
from src.grammar.tree import ParseNode
from src.inference.beam import UNSET
from src.inference.parser import parse_scene
from src.inference.statements import Exhausted
from src.model.trained import TrainedGrammar
from src.model.training import train
from src.scene.model import Scene
from src.synth.corpus import Corpus, assign_folds
from src.utils.config import settings
from src.utils.logging import get_logger

logger = get_logger("evaluation.harness")


@dataclass
class SceneOutcome:
    name: str
    fold: int
    pred: Dict[int, str]
    gold: Dict[int, str]
    cost: Optional[float]
    algorithm: str
    exhausted: bool = False


@dataclass
class EvaluationResult:
    """Pooled label report over all held-out scenes plus per-fold and per-scene detail."""

    report: LabelReport
    recovery: RecoveryReport
    folds: List[Dict[str, Any]] = field(default_factory=list)
    scenes: List[SceneOutcome] = field(default_factory=list)

    @property
    def exhausted(self) -> int:
        return sum(1 for s in self.scenes if s.exhausted)

    def sidecar(self) -> Dict[str, Any]:
        return {
            "recovery": self.recovery.to_dict(),
            "folds": self.folds,
            "exhausted": self.exhausted,
            "scenes": [
                {"name": s.name, "fold": s.fold, "cost": s.cost, "algorithm": s.algorithm, "exhausted": s.exhausted}
                for s in self.scenes
            ],
        }


def _parse_job(job: Tuple[Scene, TrainedGrammar, str, bool, Optional[int], Dict[str, Any]]):
    scene, tg, algorithm, fallback, seed, options = job
    return parse_scene(scene, tg, algorithm=algorithm, fallback=fallback, seed=seed, **options)


def _fold_assignment(corpus: Corpus, folds: Optional[int], seed: int) -> Tuple[int, List[int]]:
    if folds is None or folds == corpus.folds:
        return corpus.folds, [e.fold for e in corpus.manifest.entries]
    return folds, assign_folds(len(corpus), folds, seed)


def cross_validate(
    corpus: Corpus,
    grammar: Optional[Grammar] = None,
    folds: Optional[int] = None,
    fold: Optional[int] = None,
    algorithm: str = "kld",
    fallback: bool = True,
    from_gold: bool = False,
    workers: int = 1,
    seed: Optional[int] = None,
    beam_width=UNSET,
    samples_per_state=UNSET,
    max_expansions: Optional[int] = None,
    max_seconds: Optional[float] = None,
) -> EvaluationResult:
    """
    Train on all folds but one, label the held-out scenes, and pool the labels.

    Args:
        corpus: Loaded corpus
        grammar: Untrained grammar to fit on each training split; the rules of the
            training trees are extracted when omitted
        folds: Number of folds; the manifest's assignment is used when it matches
        fold: Evaluate this held-out fold only
        algorithm: Parsing algorithm
        fallback: Re-parse with beam search when KLD runs out of budget
        from_gold: Label held-out scenes from their own ground-truth derivations
            instead of parsing them
        workers: Parser processes; 1 parses in this process
        seed: Base seed; scene ``i`` is parsed with ``seed + i``

    Returns:
        Evaluation result

    Raises:
        ValueError: ``fold`` is not one of the folds.
    """
    seed = settings.seed if seed is None else seed
    n_folds, fold_of = _fold_assignment(corpus, folds, seed)
    if fold is not None and not 0 <= fold < n_folds:
        raise ValueError(f"fold {fold} outside 0..{n_folds - 1}")
    scenes, trees = corpus.load_all()
    options: Dict[str, Any] = {"max_expansions": max_expansions, "max_seconds": max_seconds}
    if beam_width is not UNSET:
        options["beam_width"] = beam_width
    if samples_per_state is not UNSET:
        options["samples_per_state"] = samples_per_state

    pred: Dict[Tuple[str, int], str] = {}
    gold: Dict[Tuple[str, int], str] = {}
    recovery = RecoveryReport()
    outcomes: List[SceneOutcome] = []
    fold_rows: List[Dict[str, Any]] = []

    full_grammar = grammar if grammar is not None else build_grammar(trees)
    for held_out in range(n_folds) if fold is None else [fold]:
        train_idx = [i for i in range(len(scenes)) if fold_of[i] != held_out]
        test_idx = [i for i in range(len(scenes)) if fold_of[i] == held_out]
        if not test_idx:
            continue
        started = time.perf_counter()

        if from_gold:
            derivations = [derive_tree(trees[i], full_grammar, scenes[i]) for i in test_idx]
            results = [(d, None, "gold", False) for d in derivations]
            label_grammar = full_grammar
            train_time = 0.0
        else:
            train_trees = [trees[i] for i in train_idx]
            base = grammar if grammar is not None else build_grammar(train_trees)
            tg = train(train_trees, [scenes[i] for i in train_idx], base)
            train_time = time.perf_counter() - started
            label_grammar = tg.grammar
            jobs = [(scenes[i], tg, algorithm, fallback, seed + i, options) for i in test_idx]
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    parsed = list(pool.map(_parse_job, jobs))
            else:
                parsed = [_parse_job(job) for job in jobs]
            results = []
            for outcome in parsed:
                if isinstance(outcome, Exhausted):
                    results.append((ParseNode(settings.start_symbol, frozenset()), None, "kld", True))
                else:
                    results.append((outcome.tree, outcome.cost, outcome.algorithm, False))

        for i, (tree, cost, used, exhausted) in zip(test_idx, results):
            scene = scenes[i]
            key = scene.name or f"scene_{i:03d}"
            gold_labels = extract_labels(trees[i], label_grammar, scene.terminal_ids)
            pred_labels = extract_labels(tree, label_grammar, scene.terminal_ids)
            recovery = recovery + object_recovery(tree, trees[i], label_grammar)
            for t in scene.terminal_ids:
                pred[(key, t)] = pred_labels[t]
                gold[(key, t)] = gold_labels[t]
            outcomes.append(SceneOutcome(key, held_out, pred_labels, gold_labels, cost, used, exhausted))
            logger.debug(f"Fold {held_out}: labelled '{key}' with {used} (cost {cost})")

        elapsed = time.perf_counter() - started
        fold_rows.append(
            {"fold": held_out, "train": len(train_idx), "test": len(test_idx), "train_seconds": train_time, "seconds": elapsed}
        )
        logger.info(f"Fold {held_out + 1}/{n_folds}: {len(test_idx)} scenes labelled in {elapsed:.2f}s")

    report = precision_recall(pred, gold)
    logger.info(
        f"Cross-validation over {len(outcomes)} scenes: macro recall {report.macro_recall:.1f}, "
        f"macro precision {report.macro_precision:.1f}"
    )
    return EvaluationResult(report=report, recovery=recovery, folds=fold_rows, scenes=outcomes)

