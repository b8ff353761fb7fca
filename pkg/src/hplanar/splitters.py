"""(a, b)-splitter families over a small universe."""

import logging
import random
from collections.abc import Iterator
from dataclasses import dataclass
from itertools import combinations

from .errors import PreconditionError
from .graph import VertexSet, bits, from_mask, to_mask

logger = logging.getLogger(__name__)

# candidates drawn per greedy round
POOL_SIZE = 6


@dataclass(frozen=True)
class SplitterFamily:
    """For each disjoint A, B with |A| <= a and |B| <= b some R has A inside and B outside."""

    universe_size: int
    a: int
    b: int
    sets: tuple[VertexSet, ...]

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[VertexSet]:
        return iter(self.sets)


def _maximal_pairs(n: int, a: int, b: int) -> list[tuple[int, int]]:
    """Pairs whose separation implies separation of every smaller pair."""
    full = (1 << n) - 1
    pairs: list[tuple[int, int]] = []
    if a + b <= n:
        for left in combinations(range(n), a):
            left_mask = to_mask(left)
            rest = [v for v in range(n) if not (left_mask >> v) & 1]
            for right in combinations(rest, b):
                pairs.append((left_mask, to_mask(right)))
    else:
        for size in range(max(0, n - b), min(a, n) + 1):
            for left in combinations(range(n), size):
                left_mask = to_mask(left)
                pairs.append((left_mask, full & ~left_mask))
    return pairs


def splitter_family(universe_size: int, a: int, b: int, seed: int = 0) -> SplitterFamily:
    """Greedy cover of the maximal (A, B) constraints by seeded random candidates."""
    if universe_size < 0 or a < 0 or b < 0:
        raise PreconditionError(f"need non-negative parameters, got n={universe_size}, a={a}, b={b}")
    n = universe_size
    if a == 0 or n == 0:
        return SplitterFamily(n, a, b, (frozenset(),))
    if b == 0:
        return SplitterFamily(n, a, b, (frozenset(range(n)),))

    rng = random.Random(seed)
    bias = a / (a + b)
    uncovered = _maximal_pairs(n, a, b)
    chosen: list[int] = []
    while uncovered:
        left, right = uncovered[0]
        anchor = left
        for v in range(n):
            if not ((left | right) >> v) & 1 and rng.random() < bias:
                anchor |= 1 << v
        pool = [anchor]
        for _ in range(POOL_SIZE - 1):
            pool.append(sum(1 << v for v in range(n) if rng.random() < bias))
        best, best_hits = anchor, -1
        for cand in pool:
            hits = sum(1 for la, rb in uncovered if not la & ~cand and not rb & cand)
            if hits > best_hits:
                best, best_hits = cand, hits
        chosen.append(best)
        uncovered = [(la, rb) for la, rb in uncovered if la & ~best or rb & best]

    logger.debug(f"Splitter family n={n} a={a} b={b}: {len(chosen)} sets")
    return SplitterFamily(n, a, b, tuple(from_mask(m) for m in chosen))


def is_splitter(family: SplitterFamily) -> bool:
    """Exhaustive check of the covering property over every admissible pair."""
    n = family.universe_size
    masks = [to_mask(s) for s in family.sets]
    for size_a in range(min(family.a, n) + 1):
        for left in combinations(range(n), size_a):
            left_mask = to_mask(left)
            rest = [v for v in range(n) if not (left_mask >> v) & 1]
            for size_b in range(min(family.b, len(rest)) + 1):
                for right in combinations(rest, size_b):
                    right_mask = to_mask(right)
                    if not any(not left_mask & ~m and not right_mask & m for m in masks):
                        logger.debug(
                            f"Pair {list(bits(left_mask))} / {list(bits(right_mask))} is not split"
                        )
                        return False
    return True
