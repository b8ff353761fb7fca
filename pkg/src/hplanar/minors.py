"""Brute-force minor model search."""

import logging
from collections import deque
from collections.abc import Iterator
from typing import Optional

from .config import DEFAULT_MINOR_CEILING
from .errors import check_ceiling
from .graph import Graph, MinorModel, from_mask, neighborhood_mask

logger = logging.getLogger(__name__)


def connected_subsets(g: Graph, max_size: int) -> Iterator[int]:
    """Every connected vertex set of size <= max_size, as a bitmask, each exactly once."""
    masks = g.masks

    def grow(current: int, size: int, extension: int, excluded: int) -> Iterator[int]:
        yield current
        if size == max_size:
            return
        ext = extension
        while ext:
            low = ext & -ext
            ext ^= low
            u = low.bit_length() - 1
            new_ext = (ext | masks[u]) & ~excluded & ~current & ~low
            yield from grow(current | low, size + 1, new_ext, excluded)
            # later branches never contain u
            excluded |= low

    for v in range(g.n):
        # sets whose lowest vertex is v
        below = (1 << (v + 1)) - 1
        yield from grow(1 << v, 1, masks[v] & ~below, below)


def _pattern_order(pattern: Graph) -> list[int]:
    """BFS order per component, starting each component at its highest-degree vertex."""
    order: list[int] = []
    seen: set[int] = set()
    starts = sorted(pattern.vertices, key=lambda v: (-pattern.degree(v), v))
    for start in starts:
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        while queue:
            x = queue.popleft()
            order.append(x)
            for y in sorted(pattern.neighbors(x), key=lambda v: (-pattern.degree(v), v)):
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
    return order


def find_minor(
    host: Graph,
    pattern: Graph,
    ceiling: Optional[int] = DEFAULT_MINOR_CEILING,
) -> Optional[MinorModel]:
    """Search for a pattern-minor model in host; None certifies absence."""
    check_ceiling("find_minor", pattern.n, ceiling)
    if pattern.n == 0:
        return MinorModel(branch_sets={})
    if pattern.n > host.n or pattern.m > host.m:
        return None

    max_size = host.n - pattern.n + 1
    candidates = sorted(connected_subsets(host, max_size), key=lambda s: (s.bit_count(), s))
    boundary = {s: neighborhood_mask(host, s) for s in candidates}
    order = _pattern_order(pattern)
    position = {x: i for i, x in enumerate(order)}
    earlier_neighbors = [
        [y for y in pattern.neighbors(x) if position[y] < position[x]] for x in order
    ]
    assigned: dict[int, int] = {}

    def search(i: int, used: int) -> bool:
        if i == len(order):
            return True
        if used.bit_count() + (len(order) - i) > host.n:
            return False
        x = order[i]
        need = pattern.degree(x)
        for cand in candidates:
            if cand & used:
                continue
            if boundary[cand].bit_count() < need:
                continue
            if any(not (cand & boundary[assigned[y]]) for y in earlier_neighbors[i]):
                continue
            assigned[x] = cand
            if search(i + 1, used | cand):
                return True
            del assigned[x]
        return False

    if not search(0, 0):
        logger.debug(f"No {pattern!r} minor in {host!r}")
        return None
    model = MinorModel(branch_sets={x: from_mask(s) for x, s in assigned.items()})
    logger.debug(f"Minor model found with branch sizes {[len(b) for b in model.branch_sets.values()]}")
    return model


def has_minor(host: Graph, pattern: Graph, ceiling: Optional[int] = DEFAULT_MINOR_CEILING) -> bool:
    return find_minor(host, pattern, ceiling=ceiling) is not None


def contract_model(host: Graph, model: MinorModel) -> set[tuple[int, int]]:
    """Pattern-vertex pairs whose branch sets are adjacent in host."""
    adjacent: set[tuple[int, int]] = set()
    keys = sorted(model.branch_sets)
    for i, x in enumerate(keys):
        x_boundary = 0
        for v in model.branch_sets[x]:
            x_boundary |= host.masks[v]
        for y in keys[i + 1:]:
            if any(x_boundary >> v & 1 for v in model.branch_sets[y]):
                adjacent.add((x, y))
    return adjacent


