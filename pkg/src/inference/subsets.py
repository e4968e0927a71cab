"""
Connected terminal subsets of a scene, as bitmasks over the scene's segment order.
"""
from typing import Dict, FrozenSet, Iterator, List

from src.scene.model import Scene


def neighbor_masks(scene: Scene) -> List[int]:
    masks = [0] * len(scene)
    for i, j in scene.edges:
        a, b = scene.index[i], scene.index[j]
        masks[a] |= 1 << b
        masks[b] |= 1 << a
    return masks


def connected_masks(scene: Scene) -> List[int]:
    """
    Every non-empty connected subset, each exactly once, sorted by size then value.

    A subset is grown only by neighbors of higher index than its smallest member, so
    each is reached from its smallest member alone.
    """
    nbrs = neighbor_masks(scene)
    found = set()
    for root in range(len(scene)):
        allowed = ~((1 << root) - 1)
        stack = [1 << root]
        while stack:
            mask = stack.pop()
            if mask in found:
                continue
            found.add(mask)
            frontier = 0
            rest = mask
            while rest:
                low = rest & -rest
                frontier |= nbrs[low.bit_length() - 1]
                rest ^= low
            frontier &= allowed & ~mask
            while frontier:
                low = frontier & -frontier
                stack.append(mask | low)
                frontier ^= low
    return sorted(found, key=lambda m: (bin(m).count("1"), m))


def mask_to_span(scene: Scene, mask: int) -> FrozenSet[int]:
    ids = scene.terminal_ids
    return frozenset(ids[k] for k in range(len(ids)) if mask >> k & 1)


def connected_subsets(scene: Scene) -> List[FrozenSet[int]]:
    """Connected spans of the scene, smallest first."""
    return [mask_to_span(scene, m) for m in connected_masks(scene)]


def splits(mask: int, connected: Dict[int, bool]) -> Iterator[tuple]:
    """Ordered pairs (a, b) partitioning ``mask``, both connected, with ``a`` holding its lowest bit."""
    low = mask & -mask
    rest = mask ^ low
    sub = rest
    while True:
        a = sub | low
        b = mask ^ a
        if b and connected.get(a) and connected.get(b):
            yield a, b
        if sub == 0:
            break
        sub = (sub - 1) & rest
