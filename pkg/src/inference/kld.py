"""
Knuth's lightest derivation: best-first search over grammar statements.
"""
import heapq
import itertools
import time
from collections import defaultdict
from typing import Callable, Dict, List, Optional, Tuple, Union

from src.inference.statements import (
    Exhausted,
    ParseContext,
    ParseResult,
    ParseStats,
    Statement,
    StatementKey,
    greedy_forest,
    to_parse_tree,
)
from src.model.trained import TrainedGrammar
from src.scene.model import Scene
from src.utils.config import settings
from src.utils.logging import get_logger

logger = get_logger("inference.kld")

DeriveHook = Callable[[Statement], None]


class Agenda:
    """
    Priority queue of pending statements.

    Entries are ordered by (cost, span size, symbol, insertion order). A statement
    is only pushed when it beats every pending entry with the same key; stale
    entries are skipped when popped.
    """

    def __init__(self):
        self.heap: List[Tuple[float, int, str, int, Statement]] = []
        self.best: Dict[StatementKey, float] = {}
        self.counter = itertools.count()
        self.peak = 0

    def __len__(self) -> int:
        return len(self.heap)

    def push(self, stmt: Statement) -> bool:
        key = stmt.key
        if self.best.get(key, float("inf")) <= stmt.cost:
            return False
        self.best[key] = stmt.cost
        heapq.heappush(self.heap, (stmt.cost, len(stmt.span), stmt.symbol, next(self.counter), stmt))
        self.peak = max(self.peak, len(self.heap))
        return True

    def pop(self) -> Statement:
        return heapq.heappop(self.heap)[-1]


def parse_kld(
    scene: Scene,
    tg: TrainedGrammar,
    max_expansions: Optional[int] = None,
    max_seconds: Optional[float] = None,
    on_derive: Optional[DeriveHook] = None,
) -> Union[ParseResult, Exhausted]:
    """
    Find the cheapest goal derivation of a scene.

    Every terminal starts as a zero-cost statement. The cheapest pending statement
    is derived next; each derivation is combined with every compatible derived
    statement through the grammar's rules. Since no rule cost is negative, the
    first goal statement derived is optimal.

    Args:
        scene: Scene to parse
        tg: Trained grammar
        max_expansions: Derivation budget (defaults to the configured one)
        max_seconds: Wall-clock budget (defaults to the configured one)
        on_derive: Called with every statement as it is derived

    Returns:
        The optimal parse, or Exhausted with the best partial forest found
    """
    max_expansions = settings.kld_max_expansions if max_expansions is None else max_expansions
    max_seconds = settings.kld_max_seconds if max_seconds is None else max_seconds
    ctx = ParseContext(scene, tg)
    stats = ParseStats()
    started = time.perf_counter()

    agenda = Agenda()
    derived: Dict[StatementKey, Statement] = {}
    by_symbol: Dict[str, List[Statement]] = defaultdict(list)
    for terminal in ctx.terminals:
        agenda.push(terminal)

    def offer(stmt: Optional[Statement]) -> None:
        if stmt is not None and stmt.key not in derived:
            agenda.push(stmt)

    def finish(reason: str) -> Exhausted:
        stats.queue_peak = agenda.peak
        stats.wall_time = time.perf_counter() - started
        roots = greedy_forest([s for s in derived.values() if not s.is_terminal])
        logger.warning(
            f"KLD stopped without a goal on '{scene.name}' ({reason}): "
            f"{stats.expansions} expansions in {stats.wall_time:.2f}s"
        )
        return Exhausted(reason=reason, forest=tuple(to_parse_tree(r) for r in roots), stats=stats)

    while agenda:
        if stats.expansions >= max_expansions:
            return finish("budget")
        if stats.expansions % 256 == 0 and time.perf_counter() - started > max_seconds:
            return finish("budget")

        stmt = agenda.pop()
        if stmt.key in derived:
            continue
        derived[stmt.key] = stmt
        stats.expansions += 1
        stats.max_derived_cost = max(stats.max_derived_cost, stmt.cost)
        if on_derive is not None:
            on_derive(stmt)

        if stmt.symbol == tg.grammar.start:
            stats.queue_peak = agenda.peak
            stats.wall_time = time.perf_counter() - started
            logger.info(
                f"KLD parsed '{scene.name}': cost {stmt.cost:.4f}, "
                f"{stats.expansions} expansions, peak queue {stats.queue_peak}, {stats.wall_time:.3f}s"
            )
            return ctx.result(stmt, "kld", stats)

        offer(ctx.goal(stmt))
        for rule in ctx.unary[stmt.symbol]:
            offer(ctx.apply(rule, (stmt,)))
        by_symbol[stmt.symbol].append(stmt)
        for rule, other in ctx.binary[stmt.symbol]:
            for partner in by_symbol[other]:
                if ctx.applicable(rule, (stmt, partner)):
                    offer(ctx.apply(rule, (stmt, partner)))

    return finish("no_goal")
