"""
Exhaustive dynamic program over connected spans, for checking the searches on tiny scenes.
"""
import time
from collections import defaultdict
from typing import Dict, List, Optional

from src.inference.statements import ParseContext, ParseResult, ParseStats, Statement, StatementKey
from src.inference.subsets import connected_masks, splits
from src.model.trained import TrainedGrammar
from src.scene.model import Scene
from src.utils.config import settings
from src.utils.errors import TerminalLimitError
from src.utils.logging import get_logger

logger = get_logger("inference.exhaustive")


def _keep(table: Dict[StatementKey, Statement], stmt: Statement) -> bool:
    held = table.get(stmt.key)
    if held is None or stmt.cost < held.cost:
        table[stmt.key] = stmt
        return True
    return False


def parse_exhaustive(scene: Scene, tg: TrainedGrammar, max_terminals: Optional[int] = None) -> ParseResult:
    """
    Exact cheapest goal derivation by enumerating every connected span.

    Spans are visited smallest first. A span's statements come from every split
    into two connected halves combined by a binary rule, then from unary rules
    applied until nothing gets cheaper.

    Args:
        scene: Scene to parse
        tg: Trained grammar
        max_terminals: Largest scene accepted (defaults to the configured cap)

    Returns:
        Optimal parse

    Raises:
        TerminalLimitError: The scene has more terminals than the cap.
    """
    cap = settings.exhaustive_max_terminals if max_terminals is None else max_terminals
    if len(scene) > cap:
        raise TerminalLimitError(f"exhaustive parsing handles at most {cap} terminals, scene has {len(scene)}")
    ctx = ParseContext(scene, tg)
    stats = ParseStats()
    started = time.perf_counter()

    masks = connected_masks(scene)
    connected = {m: True for m in masks}
    by_mask: Dict[int, List[Statement]] = defaultdict(list)
    best: Optional[Statement] = None

    for mask in masks:
        table: Dict[StatementKey, Statement] = {}
        if mask & (mask - 1) == 0:
            _keep(table, ctx.terminals[mask.bit_length() - 1])
        for a, b in splits(mask, connected):
            for x in by_mask[a]:
                for rule, other in ctx.binary[x.symbol]:
                    for y in by_mask[b]:
                        if y.symbol == other and ctx.applicable(rule, (x, y)):
                            _keep(table, ctx.apply(rule, (x, y)))
        changed = True
        while changed:
            changed = False
            for stmt in list(table.values()):
                for rule in ctx.unary[stmt.symbol]:
                    if _keep(table, ctx.apply(rule, (stmt,))):
                        changed = True

        by_mask[mask] = list(table.values())
        stats.expansions += len(table)
        for stmt in by_mask[mask]:
            goal = ctx.goal(stmt)
            if goal is not None and (best is None or goal.cost < best.cost):
                best = goal

    stats.wall_time = time.perf_counter() - started
    stats.queue_peak = len(masks)
    if best is None:
        tree = ctx.empty_goal()
        logger.info(f"Exhaustive search found no goal for '{scene.name}'")
        return ParseResult(tree=tree, cost=tree.cost, unspanned=len(scene), algorithm="exhaustive", clamped=False, stats=stats)
    stats.max_derived_cost = max(s.cost for spans in by_mask.values() for s in spans)
    logger.info(
        f"Exhaustive parse of '{scene.name}': cost {best.cost:.4f}, {len(masks)} spans, "
        f"{stats.expansions} statements, {stats.wall_time:.3f}s"
    )
    return ctx.result(best, "exhaustive", stats)
