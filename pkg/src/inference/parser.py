"""
Algorithm dispatch with the KLD-to-beam fallback.
"""
from typing import Optional, Union

from src.inference.beam import UNSET, parse_beam
from src.inference.exhaustive import parse_exhaustive
from src.inference.kld import parse_kld
from src.inference.statements import Exhausted, ParseResult
from src.model.trained import TrainedGrammar
from src.scene.model import Scene
from src.utils.logging import get_logger

logger = get_logger("inference.parser")

ALGORITHMS = ("kld", "beam", "exhaustive")


def parse_scene(
    scene: Scene,
    tg: TrainedGrammar,
    algorithm: str = "kld",
    fallback: bool = True,
    beam_width=UNSET,
    samples_per_state=UNSET,
    seed: Optional[int] = None,
    max_expansions: Optional[int] = None,
    max_seconds: Optional[float] = None,
) -> Union[ParseResult, Exhausted]:
    """
    Parse one scene with the named algorithm.

    When KLD runs out of budget and ``fallback`` is set, the scene is parsed again
    with beam search.

    Returns:
        The parse, or Exhausted when KLD gave up and fallback is off

    Raises:
        ValueError: Unknown algorithm name.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm '{algorithm}', expected one of {', '.join(ALGORITHMS)}")
    if algorithm == "exhaustive":
        return parse_exhaustive(scene, tg)
    if algorithm == "beam":
        return parse_beam(scene, tg, beam_width, samples_per_state, seed)

    result = parse_kld(scene, tg, max_expansions=max_expansions, max_seconds=max_seconds)
    if isinstance(result, ParseResult) or not fallback:
        return result
    logger.warning(f"Falling back to beam search for '{scene.name}' after KLD stopped ({result.reason})")
    return parse_beam(scene, tg, beam_width, samples_per_state, seed)
