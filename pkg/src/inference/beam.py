"""
Stochastic beam search over forests of partial parse trees.
"""
import heapq
import time
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.grammar.symbols import Rule
from src.inference.statements import Forest, ParseContext, ParseResult, ParseStats, Statement, StatementKey
from src.model.trained import TrainedGrammar
from src.scene.model import Scene
from src.utils.config import settings
from src.utils.logging import get_logger

logger = get_logger("inference.beam")

UNSET = object()


class _Applications:
    """Memo of rule applications keyed by rule and the children's keys and costs."""

    def __init__(self, ctx: ParseContext):
        self.ctx = ctx
        self.made: Dict[Tuple[Rule, Tuple[Tuple[StatementKey, float], ...]], Statement] = {}

    def __call__(self, rule: Rule, items: Tuple[Statement, ...]) -> Statement:
        key = (rule, tuple(sorted((i.key, i.cost) for i in items)))
        stmt = self.made.get(key)
        if stmt is None:
            stmt = self.made[key] = self.ctx.apply(rule, items)
        return stmt


def successors(forest: Forest, ctx: ParseContext, apply: _Applications) -> List[Tuple[Forest, float]]:
    """Every forest one rule application away, with the cost of that application."""
    out: List[Tuple[Forest, float]] = []
    roots = forest.roots
    for i, a in enumerate(roots):
        for rule in ctx.unary[a.symbol]:
            made = apply(rule, (a,))
            out.append((forest.replace((a,), made), made.rule_cost))
        for b in roots[i + 1:]:
            for rule, other in ctx.binary[a.symbol]:
                if other != b.symbol or not ctx.applicable(rule, (a, b)):
                    continue
                made = apply(rule, (a, b))
                out.append((forest.replace((a, b), made), made.rule_cost))
    return out


def sample_successors(costs: np.ndarray, draws: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draw up to ``draws`` distinct indices with probability proportional to exp(-cost).

    Weights that underflow to zero once normalized are never drawn, so fewer than
    ``draws`` indices come back when too few candidates keep a non-zero probability.
    """
    weights = np.exp(-(costs - costs.min()))
    p = weights / weights.sum()
    draws = min(draws, int(np.count_nonzero(p)))
    return np.sort(rng.choice(len(costs), size=draws, replace=False, p=p))


def parse_beam(
    scene: Scene,
    tg: TrainedGrammar,
    beam_width=UNSET,
    samples_per_state=UNSET,
    seed: Optional[int] = None,
    max_steps: Optional[int] = None,
) -> ParseResult:
    """
    Approximate the cheapest goal derivation by sampling forests.

    The beam starts from the forest of isolated terminals. Each step pools the
    successors of every beamed forest, samples without replacement with probability
    proportional to exp(-rule cost), and keeps the cheapest distinct forests not
    visited before. The search stops when no rule applies to any beamed forest. The
    answer is the cheapest goal over any root of any visited forest.

    Args:
        scene: Scene to parse
        tg: Trained grammar
        beam_width: Forests kept per step; None keeps all
        samples_per_state: Successors drawn per beamed forest; None draws all
        seed: Seed of the sampling generator
        max_steps: Step guard

    Returns:
        Best parse found
    """
    width = settings.beam_width if beam_width is UNSET else beam_width
    per_state = settings.beam_samples_per_state if samples_per_state is UNSET else samples_per_state
    seed = settings.seed if seed is None else seed
    max_steps = settings.beam_max_steps if max_steps is None else max_steps
    rng = np.random.default_rng(seed)
    ctx = ParseContext(scene, tg)
    apply = _Applications(ctx)
    stats = ParseStats()
    started = time.perf_counter()

    start = Forest(ctx.terminals)
    beam: List[Forest] = [start]
    seen: Dict = {start.key: start.total_cost}
    best: Optional[Statement] = None

    def consider(forest: Forest) -> None:
        nonlocal best
        for root in forest.roots:
            goal = ctx.goal(root)
            if goal is not None and (best is None or (goal.cost, len(goal.span)) < (best.cost, len(best.span))):
                best = goal

    def fresh(forest: Forest) -> bool:
        return forest.total_cost < seen.get(forest.key, float("inf"))

    consider(start)
    while beam and stats.steps < max_steps:
        pool: Dict = {}
        for forest in beam:
            for succ, cost in successors(forest, ctx, apply):
                if not fresh(succ):
                    continue
                held = pool.get(succ.key)
                if held is None or succ.total_cost < held[0].total_cost:
                    pool[succ.key] = (succ, cost)
        if not pool:
            break
        stats.steps += 1
        candidates = list(pool.values())
        draws = len(candidates) if per_state is None else min(per_state * len(beam), len(candidates))
        if draws < len(candidates):
            picked = sample_successors(np.array([c for _, c in candidates]), draws, rng)
            candidates = [candidates[k] for k in picked]
        forests = [f for f, _ in candidates]
        if width is not None:
            forests = heapq.nsmallest(width, forests, key=lambda f: f.total_cost)
        for forest in forests:
            seen[forest.key] = forest.total_cost
            consider(forest)
        stats.expansions += len(forests)
        stats.queue_peak = max(stats.queue_peak, len(pool))
        beam = forests

    stats.wall_time = time.perf_counter() - started
    if stats.steps >= max_steps:
        logger.warning(f"Beam search on '{scene.name}' hit the step guard ({max_steps})")
    if best is None:
        logger.warning(f"Beam search found no goal for '{scene.name}'; every terminal is left unspanned")
        tree = ctx.empty_goal()
        return ParseResult(tree=tree, cost=tree.cost, unspanned=len(scene), algorithm="beam", clamped=False, stats=stats)

    stats.max_derived_cost = best.cost
    logger.info(
        f"Beam parsed '{scene.name}': cost {best.cost:.4f}, {stats.steps} steps, "
        f"{len(seen)} forests, {stats.wall_time:.3f}s"
    )
    return ctx.result(best, "beam", stats)
