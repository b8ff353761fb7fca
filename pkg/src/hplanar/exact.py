"""Exhaustive solvers used as sub-solvers and as test oracles."""

import logging
from collections.abc import Callable
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .config import (
    DEFAULT_COLOR_CEILING,
    DEFAULT_INDEPENDENT_CEILING,
    DEFAULT_PMM_CEILING,
    DEFAULT_SUBSET_CEILING,
)
from .errors import check_ceiling
from .graph import Graph, VertexSet, bits, from_mask, remove_vertices

logger = logging.getLogger(__name__)


def is_independent(g: Graph, vertices: VertexSet) -> bool:
    return all(not (g.neighbors(v) & vertices) for v in vertices)


def is_proper_coloring(g: Graph, colors: dict[int, int] | tuple[int, ...]) -> bool:
    return all(colors[u] != colors[v] for u, v in g.edges)


def find_coloring(g: Graph, k: int) -> Optional[tuple[int, ...]]:
    """A proper coloring with colors in 0..k-1, or None if none exists.

    DSATUR branching; a vertex may open at most one new color, which removes
    color-permutation symmetry.
    """
    n = g.n
    if n == 0:
        return ()
    if k <= 0:
        return None
    colors = [-1] * n
    neighbor_colors: list[dict[int, int]] = [{} for _ in range(n)]

    def pick() -> int:
        best = -1
        best_key = (-1, -1)
        for v in range(n):
            if colors[v] >= 0:
                continue
            key = (
                len(neighbor_colors[v]),
                sum(1 for u in g.neighbors(v) if colors[u] < 0),
            )
            if key > best_key:
                best, best_key = v, key
        return best

    def assign(v: int, c: int, delta: int) -> None:
        for u in g.neighbors(v):
            counts = neighbor_colors[u]
            counts[c] = counts.get(c, 0) + delta
            if counts[c] == 0:
                del counts[c]

    def search(done: int, used: int) -> bool:
        if done == n:
            return True
        v = pick()
        for c in range(min(used + 1, k)):
            if c in neighbor_colors[v]:
                continue
            colors[v] = c
            assign(v, c, 1)
            if search(done + 1, max(used, c + 1)):
                return True
            assign(v, c, -1)
            colors[v] = -1
        return False

    if not search(0, 0):
        return None
    return tuple(colors)


def chromatic_number(
    g: Graph, ceiling: Optional[int] = DEFAULT_COLOR_CEILING
) -> tuple[int, tuple[int, ...]]:
    """Exact chromatic number together with an optimal coloring."""
    check_ceiling("chromatic_number", g.n, ceiling)
    if g.n == 0:
        return 0, ()
    k = 1 if g.m == 0 else 2
    while True:
        coloring = find_coloring(g, k)
        if coloring is not None:
            return k, coloring
        k += 1


def max_independent_set(
    g: Graph, ceiling: Optional[int] = DEFAULT_INDEPENDENT_CEILING
) -> VertexSet:
    """A maximum independent set; ties go to the set found first by the branching."""
    check_ceiling("max_independent_set", g.n, ceiling)
    masks = g.masks
    memo: dict[int, int] = {}

    def solve(mask: int) -> int:
        if mask == 0:
            return 0
        if mask in memo:
            return memo[mask]
        pivot = -1
        pivot_degree = -1
        for v in bits(mask):
            d = (masks[v] & mask).bit_count()
            if d <= 1:
                # a vertex of degree <= 1 is always in some optimum
                result = (1 << v) | solve(mask & ~(1 << v) & ~masks[v])
                memo[mask] = result
                return result
            if d > pivot_degree:
                pivot, pivot_degree = v, d
        take = (1 << pivot) | solve(mask & ~(1 << pivot) & ~masks[pivot])
        skip = solve(mask & ~(1 << pivot))
        result = take if take.bit_count() >= skip.bit_count() else skip
        memo[mask] = result
        return result

    return from_mask(solve(g.full_mask))


def min_deletion_set(
    g: Graph,
    membership: Callable[[Graph], bool],
    budget: int,
    ceiling: Optional[int] = DEFAULT_SUBSET_CEILING,
) -> Optional[VertexSet]:
    """Smallest S with |S| <= budget such that g - S satisfies membership."""
    check_ceiling("min_deletion_set", g.n, ceiling)
    for size in range(min(budget, g.n) + 1):
        for chosen in combinations(range(g.n), size):
            rest, _ = remove_vertices(g, chosen)
            if membership(rest):
                return frozenset(chosen)
    return None


def pmm_bruteforce(g: Graph, ceiling: Optional[int] = DEFAULT_PMM_CEILING) -> Fraction:
    """Weighted perfect-matching count by expansion along the lowest unmatched vertex."""
    check_ceiling("pmm_bruteforce", g.n, ceiling)
    if g.n % 2:
        return Fraction(0)
    masks = g.masks
    memo: dict[int, Fraction] = {0: Fraction(1)}

    def count(mask: int) -> Fraction:
        if mask in memo:
            return memo[mask]
        low = mask & -mask
        v = low.bit_length() - 1
        rest = mask ^ low
        total = Fraction(0)
        for u in bits(masks[v] & rest):
            total += g.weight(v, u) * count(rest & ~(1 << u))
        memo[mask] = total
        return total

    return count(g.full_mask)
