"""
Command line for generating corpora, training grammars, parsing scenes and evaluating labels.

Usage examples:
    python scripts/scene_grammar.py gen --n 84 --seed 7 --out data/corpus
    python scripts/scene_grammar.py extract-rules data/corpus --out grammars/extracted.json
    python scripts/scene_grammar.py train --corpus data/corpus --out models/office.json
    python scripts/scene_grammar.py parse --grammar models/office.json --scene data/corpus/scene_000.json --dot tree.dot
    python scripts/scene_grammar.py eval --corpus data/corpus --folds 4 --out reports/labels.tsv
    python scripts/scene_grammar.py compose models/a.json models/b.json --out models/ab.json
"""
import argparse
import sys
import time
from pathlib import Path
from typing import List, Optional, Tuple

from src.evaluation.dot import export_dot
from src.evaluation.harness import cross_validate
from src.evaluation.labels import extract_labels
from src.evaluation.metrics import write_report
from src.grammar.grammar import Grammar, build_grammar, format_rules
from src.inference.beam import UNSET
from src.inference.parser import ALGORITHMS, parse_scene
from src.inference.statements import Exhausted
from src.model.compose import compose
from src.model.store import load_grammar, load_trained_grammar, save_grammar
from src.model.training import train
from src.scene.io import load_scene, load_tree, write_json
from src.scene.model import Scene
from src.scene.tree import GroundTruthTree
from src.synth.corpus import gen_corpus, load_corpus
from src.synth.template import TEMPLATES, load_template
from src.utils.config import settings
from src.utils.errors import SceneGrammarError
from src.utils.logging import get_logger, setup_logging

logger = get_logger("cli")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_EXHAUSTED = 3


def _optional_int(value: str) -> Optional[int]:
    """Integer option where ``none`` means unbounded."""
    if value.lower() in ("none", "inf", "unbounded"):
        return None
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'none', got {value}")
    return number


def _load_forest(inputs: List[str]) -> Tuple[List[Scene], List[GroundTruthTree]]:
    """Trees from corpus directories, manifests or single tree files (scenes only for corpora)."""
    scenes: List[Scene] = []
    trees: List[GroundTruthTree] = []
    for item in inputs:
        path = Path(item)
        if path.is_dir() or path.name == "manifest.json":
            corpus_scenes, corpus_trees = load_corpus(path).load_all()
            scenes.extend(corpus_scenes)
            trees.extend(corpus_trees)
        else:
            trees.append(load_tree(path))
    return scenes, trees


def cmd_gen(args: argparse.Namespace) -> int:
    template = load_template(args.template)
    path = gen_corpus(template, args.n, args.seed, args.out, folds=args.folds)
    print(f"Generated {args.n} scenes from template '{template.name}' -> {path}")
    return EXIT_OK


def cmd_extract_rules(args: argparse.Namespace) -> int:
    _, trees = _load_forest(args.inputs)
    grammar = build_grammar(trees)
    grammar.validate()
    save_grammar(grammar, args.out)
    print(f"Extracted {len(grammar.rules)} rules from {len(trees)} trees -> {args.out}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    scenes, trees = corpus.load_all()
    if args.exclude_fold is not None:
        keep, _ = corpus.split(args.exclude_fold)
        scenes, trees = [scenes[i] for i in keep], [trees[i] for i in keep]
    grammar: Grammar = load_grammar(args.grammar) if args.grammar else build_grammar(trees)

    started = time.perf_counter()
    tg = train(trees, scenes, grammar, k=args.k, schema_id=args.schema)
    elapsed = time.perf_counter() - started
    save_grammar(tg, args.out)

    print(f"Trained {len(tg.rules)} rules on {len(trees)} scenes in {elapsed:.3f}s -> {args.out}")
    for lhs in sorted({r.lhs for r in tg.rules}):
        family = [r for r in tg.rules if r.lhs == lhs]
        print(f"  {lhs}: {len(family)} rules, {tg.family_count(lhs)} applications")
    return EXIT_OK


def cmd_parse(args: argparse.Namespace) -> int:
    tg = load_trained_grammar(args.grammar)
    scene = load_scene(args.scene)
    result = parse_scene(
        scene,
        tg,
        algorithm=args.algo,
        fallback=not args.no_fallback,
        beam_width=args.beam_width,
        samples_per_state=args.samples_per_state,
        seed=args.seed,
        max_expansions=args.budget_expansions,
        max_seconds=args.budget_seconds,
    )
    if isinstance(result, Exhausted):
        print(
            f"No goal derived for '{scene.name}' ({result.reason}) after {result.stats.expansions} expansions",
            file=sys.stderr,
        )
        return EXIT_EXHAUSTED

    labels = extract_labels(result.tree, tg.grammar, scene.terminal_ids)
    print(f"Scene '{scene.name}': cost {result.cost:.6f} via {result.algorithm}, {result.unspanned} unspanned")
    for seg_id in scene.terminal_ids:
        print(f"  {seg_id}\t{labels[seg_id]}")
    if result.clamped:
        print("  (some rule costs were clamped)")
    if args.dot:
        export_dot(result.tree, args.dot)
    if args.out:
        write_json(
            {
                "scene": scene.name,
                "algorithm": result.algorithm,
                "cost": result.cost,
                "unspanned": result.unspanned,
                "clamped": result.clamped,
                "labels": {str(k): v for k, v in labels.items()},
            },
            args.out,
        )
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    grammar = load_grammar(args.grammar) if args.grammar else None
    result = cross_validate(
        corpus,
        grammar=grammar,
        folds=args.folds,
        fold=args.fold,
        algorithm=args.algo,
        fallback=not args.no_fallback,
        from_gold=args.from_gold,
        workers=args.workers,
        seed=args.seed,
        beam_width=args.beam_width,
        samples_per_state=args.samples_per_state,
        max_expansions=args.budget_expansions,
        max_seconds=args.budget_seconds,
    )
    path = write_report(result.report, args.out, extra=result.sidecar())
    print(result.report.table().round(0).astype(int).to_csv(sep="\t"), end="")
    print(f"Object recovery: {result.recovery.rate:.1f}%")
    print(f"Report -> {path}")
    return EXIT_OK


def cmd_compose(args: argparse.Namespace) -> int:
    g1 = load_trained_grammar(args.g1)
    g2 = load_trained_grammar(args.g2)
    composed = compose(g1, g2)
    save_grammar(composed, args.out)
    print(f"Composed {len(g1.rules)} + {len(g2.rules)} rules into {len(composed.rules)} -> {args.out}")
    return EXIT_OK


def cmd_rules(args: argparse.Namespace) -> int:
    print(format_rules(load_grammar(args.grammar)))
    return EXIT_OK


def _add_parse_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algo", choices=ALGORITHMS, default="kld", help="Parsing algorithm (default: kld)")
    p.add_argument("--beam-width", type=_optional_int, default=UNSET, help="Beam width, or 'none' for unbounded")
    p.add_argument(
        "--samples-per-state", type=_optional_int, default=UNSET, help="Beam samples per state, or 'none' for all"
    )
    p.add_argument("--seed", type=int, default=None, help="Beam sampling seed")
    p.add_argument("--budget-expansions", type=int, default=None, help="KLD expansion budget")
    p.add_argument("--budget-seconds", type=float, default=None, help="KLD wall-time budget")
    p.add_argument("--no-fallback", action="store_true", help="Do not fall back to beam search when KLD gives up")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scene_grammar", description="Probabilistic grammar parsing of 3D scenes")
    parser.add_argument("--log-level", default=None, help="Logging level (default from settings)")
    parser.add_argument("--log-file", default=None, help="Log file (default from settings)")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    gen = subparsers.add_parser("gen", help="Generate a labelled synthetic corpus")
    gen.add_argument("--template", default="office", help=f"Template name ({', '.join(TEMPLATES)}) or JSON file")
    gen.add_argument("--n", type=int, default=84, help="Number of scenes (default: 84)")
    gen.add_argument("--seed", type=int, default=settings.seed, help="Corpus seed")
    gen.add_argument("--folds", type=int, default=None, help="Cross-validation folds")
    gen.add_argument("--out", required=True, help="Output directory")
    gen.set_defaults(func=cmd_gen)

    extract = subparsers.add_parser("extract-rules", help="Extract a binarized grammar from labelled trees")
    extract.add_argument("inputs", nargs="+", help="Corpus directories, manifests or tree files")
    extract.add_argument("--out", required=True, help="Grammar file to write")
    extract.set_defaults(func=cmd_extract_rules)

    tr = subparsers.add_parser("train", help="Fit rule models on a corpus")
    tr.add_argument("--grammar", default=None, help="Untrained grammar (rules are extracted when omitted)")
    tr.add_argument("--corpus", required=True, help="Corpus directory or manifest")
    tr.add_argument("--exclude-fold", type=int, default=None, help="Train on every fold but this one")
    tr.add_argument("--k", type=float, default=None, help="Goal penalty per unspanned segment")
    tr.add_argument("--schema", default=None, help="Feature schema id")
    tr.add_argument("--out", required=True, help="Trained grammar file to write")
    tr.set_defaults(func=cmd_train)

    parse = subparsers.add_parser("parse", help="Parse one scene")
    parse.add_argument("--grammar", required=True, help="Trained grammar")
    parse.add_argument("--scene", required=True, help="Scene file")
    _add_parse_options(parse)
    parse.add_argument("--dot", default=None, help="Write the parse tree as DOT")
    parse.add_argument("--out", default=None, help="Write cost and labels as JSON")
    parse.set_defaults(func=cmd_parse)

    ev = subparsers.add_parser("eval", help="Cross-validated segment labeling")
    ev.add_argument("--grammar", default=None, help="Untrained grammar (rules are extracted per fold when omitted)")
    ev.add_argument("--corpus", required=True, help="Corpus directory or manifest")
    ev.add_argument("--folds", type=int, default=None, help="Number of folds (default: the corpus manifest's)")
    ev.add_argument("--fold", type=int, default=None, help="Evaluate one held-out fold only")
    _add_parse_options(ev)
    ev.add_argument("--from-gold", action="store_true", help="Label from gold derivations instead of parsing")
    ev.add_argument("--workers", type=int, default=1, help="Parser processes")
    ev.add_argument("--out", default="reports/labels.tsv", help="TSV report path")
    ev.set_defaults(func=cmd_eval)

    comp = subparsers.add_parser("compose", help="Compose two trained grammars")
    comp.add_argument("g1", help="First trained grammar (wins on shared rules)")
    comp.add_argument("g2", help="Second trained grammar")
    comp.add_argument("--out", required=True, help="Composed grammar file to write")
    comp.set_defaults(func=cmd_compose)

    rules = subparsers.add_parser("rules", help="List a grammar's rules")
    rules.add_argument("grammar", help="Grammar file")
    rules.set_defaults(func=cmd_rules)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_help()
        return EXIT_INVALID
    setup_logging(args.log_level, args.log_file)

    try:
        return args.func(args)
    except (ValueError, SceneGrammarError, FileNotFoundError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
