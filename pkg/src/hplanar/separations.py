"""Separation enumeration and (s, c)-unbreakability."""

import logging
from collections.abc import Iterator
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .config import DEFAULT_SUBSET_CEILING
from .errors import PreconditionError, check_ceiling
from .graph import Graph, Separation, components_in_mask, from_mask, to_mask

logger = logging.getLogger(__name__)


def enumerate_separations(
    g: Graph,
    max_order: int,
    small_side_bound: int,
    ceiling: Optional[int] = DEFAULT_SUBSET_CEILING,
    include_trivial: bool = False,
) -> Iterator[Separation]:
    """Yield separations (A, B) of order <= max_order with g[A - B] connected and |B - A| < bound.

    A - B ranges over the components of g - s for every separator candidate s, so each
    separation is produced exactly once. Order: separator size, then separator tuple, then
    component by lowest vertex. Separations with B - A empty are skipped unless
    include_trivial is set.
    """
    if max_order < 0:
        raise PreconditionError(f"max_order must be non-negative, got {max_order}")
    check_ceiling("enumerate_separations", g.n, ceiling)

    full = g.full_mask
    for size in range(min(max_order, g.n) + 1):
        for separator in combinations(range(g.n), size):
            s_mask = to_mask(separator)
            for comp in components_in_mask(g, full & ~s_mask):
                rest = full & ~comp & ~s_mask
                if not rest and not include_trivial:
                    continue
                if rest.bit_count() < small_side_bound:
                    yield Separation(left=from_mask(comp | s_mask), right=from_mask(full & ~comp))


@dataclass(frozen=True)
class UnbreakabilityReport:
    """Outcome of an (s, c)-unbreakability check."""

    unbreakable: bool
    witness: Optional[Separation] = None

    def __bool__(self) -> bool:
        return self.unbreakable


def split_components(sizes: list[int], s: int) -> Optional[list[int]]:
    """Indices of a component group whose total and complement total are both >= s."""
    total = sum(sizes)
    if total < 2 * s:
        return None
    # sum -> (previous sum, component index)
    reach: dict[int, Optional[tuple[int, int]]] = {0: None}
    for i, size in enumerate(sizes):
        for prev in list(reach):
            nxt = prev + size
            if nxt not in reach:
                reach[nxt] = (prev, i)
    for target in sorted(reach):
        if s <= target <= total - s:
            group = []
            cur = target
            while reach[cur] is not None:
                prev, i = reach[cur]  # type: ignore[misc]
                group.append(i)
                cur = prev
            return sorted(group)
    return None


def is_unbreakable(
    g: Graph,
    s: int,
    c: int,
    ceiling: Optional[int] = DEFAULT_SUBSET_CEILING,
) -> UnbreakabilityReport:
    """Check that no separation of order <= c has two private sides of size >= s."""
    if s < 1 or c < 0:
        raise PreconditionError(f"need s >= 1 and c >= 0, got s={s}, c={c}")
    check_ceiling("is_unbreakable", g.n, ceiling)

    full = g.full_mask
    for size in range(min(c, g.n) + 1):
        for separator in combinations(range(g.n), size):
            s_mask = to_mask(separator)
            comps = components_in_mask(g, full & ~s_mask)
            group = split_components([comp.bit_count() for comp in comps], s)
            if group is None:
                continue
            left_private = 0
            for i in group:
                left_private |= comps[i]
            witness = Separation(
                left=from_mask(left_private | s_mask),
                right=from_mask(full & ~left_private),
            )
            logger.debug(f"Witnessing separation of order {size} found at {separator}")
            return UnbreakabilityReport(unbreakable=False, witness=witness)
    return UnbreakabilityReport(unbreakable=True)
