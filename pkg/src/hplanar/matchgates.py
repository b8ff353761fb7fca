"""Planar matchgates standing in for the far side of an order-2 or order-3 separation.

Boundary vertices of a gadget are 0..size-1; internal vertices follow. A gadget F with
scale c realizes the vector p when c * pmm(F - gamma) = p[gamma] for every subset gamma
of the boundary, gamma being the boundary vertices matched outside the gadget.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Any

from .errors import ContractViolation, PreconditionError
from .exact import pmm_bruteforce
from .graph import Graph, induced_subgraph
from .planarity import is_planar_graph

logger = logging.getLogger(__name__)

Subset = frozenset[int]


class Parity(Enum):
    """Parity of |B|, the boundary together with the vertices it cuts off."""

    EVEN = "even"
    ODD = "odd"

    @classmethod
    def of(cls, size: int) -> "Parity":
        return cls.EVEN if size % 2 == 0 else cls.ODD


@dataclass(frozen=True)
class MatchgateGadget:
    boundary_size: int
    parity: Parity
    graph: Graph
    scale: Fraction
    variant: str

    @property
    def internal_count(self) -> int:
        return self.graph.n - self.boundary_size

    def realized(self, gamma: Subset) -> Fraction:
        keep = [v for v in self.graph.vertices if v not in gamma]
        sub, _ = induced_subgraph(self.graph, keep)
        return self.scale * pmm_bruteforce(sub)

    def to_json(self) -> dict[str, Any]:
        return {
            "boundary_size": self.boundary_size,
            "parity": self.parity.value,
            "variant": self.variant,
            "scale": str(self.scale),
            "n": self.graph.n,
            "edges": [[u, v, str(self.graph.weight(u, v))] for u, v in self.graph.edges],
        }


def all_subsets(size: int) -> list[Subset]:
    return [frozenset(c) for k in range(size + 1) for c in combinations(range(size), k)]


def feasible_subsets(boundary_size: int, parity: Parity) -> list[Subset]:
    """Subsets whose count can be non-zero: |gamma| has the parity of |B|."""
    want = 0 if parity is Parity.EVEN else 1
    return [s for s in all_subsets(boundary_size) if len(s) % 2 == want]


def _build(
    boundary_size: int,
    internal: int,
    weighted: list[tuple[int, int, Fraction]],
) -> Graph:
    # zero-weight edges carry no matchings
    edges = [(u, v) for u, v, w in weighted if w != 0]
    weights = {(min(u, v), max(u, v)): w for u, v, w in weighted if w != 0}
    return Graph(boundary_size + internal, edges, weights)


def _two_even(p: Mapping[Subset, Fraction]) -> tuple[Graph, Fraction, str]:
    empty, both = p[frozenset()], p[frozenset({0, 1})]
    if both != 0:
        return _build(2, 0, [(0, 1, empty / both)]), both, "edge"
    # both boundary vertices matched outside is impossible: pendants on each side
    return _build(2, 2, [(0, 2, empty), (1, 3, Fraction(1))]), Fraction(1), "pendant"


def _two_odd(p: Mapping[Subset, Fraction]) -> tuple[Graph, Fraction, str]:
    only_a, only_b = p[frozenset({0})], p[frozenset({1})]
    return _build(2, 1, [(0, 2, only_b), (1, 2, only_a)]), Fraction(1), "path"


def _three_odd(p: Mapping[Subset, Fraction]) -> tuple[Graph, Fraction, str]:
    single = [p[frozenset({i})] for i in range(3)]
    full = p[frozenset({0, 1, 2})]
    if full != 0:
        edges = [
            (1, 2, single[0] / full),
            (0, 2, single[1] / full),
            (0, 1, single[2] / full),
        ]
        return _build(3, 0, edges), full, "triangle"
    if not any(single):
        return _build(3, 2, []), Fraction(1), "null"
    # x = 3 sees all three boundary vertices, y = 4 sees two of them
    r0 = next(i for i in range(3) if single[(i + 1) % 3] or single[(i + 2) % 3])
    r1, r2 = (r0 + 1) % 3, (r0 + 2) % 3
    edges = [
        (r0, 3, Fraction(1)),
        (r1, 4, single[r2]),
        (r2, 4, single[r1]),
    ]
    if single[r1] != 0:
        edges.append((r1, 3, single[r0] / single[r1]))
    else:
        edges.append((r2, 3, single[r0] / single[r2]))
    return _build(3, 2, edges), Fraction(1), "fan"


def _three_even(p: Mapping[Subset, Fraction]) -> tuple[Graph, Fraction, str]:
    empty = p[frozenset()]
    pairs = [((1, 2), 0), ((0, 2), 1), ((0, 1), 2)]
    # x = 3 is matched to the one boundary vertex not matched outside
    spoke = {lonely: p[frozenset(pair)] for pair, lonely in pairs}
    if any(spoke.values()):
        edges = [(lonely, 3, spoke[lonely]) for _, lonely in pairs]
        pair, lonely = next((pair, lonely) for pair, lonely in pairs if spoke[lonely])
        edges.append((pair[0], pair[1], empty / spoke[lonely]))
        return _build(3, 1, edges), Fraction(1), "claw"
    if empty == 0:
        return _build(3, 1, []), Fraction(1), "null"
    edges = [(0, 3, empty), (1, 4, Fraction(1)), (2, 5, Fraction(1))]
    return _build(3, 3, edges), Fraction(1), "pendant"


_FAMILIES = {
    (2, Parity.EVEN): _two_even,
    (2, Parity.ODD): _two_odd,
    (3, Parity.EVEN): _three_even,
    (3, Parity.ODD): _three_odd,
}


def synthesize_matchgate(
    boundary_size: int,
    parity: Parity,
    p: Mapping[Subset, Fraction],
) -> MatchgateGadget:
    """Planar gadget realizing p, validated by brute force on every subset of the boundary."""
    if boundary_size not in (2, 3):
        raise PreconditionError(f"matchgates exist for boundaries of size 2 or 3, got {boundary_size}")
    feasible = feasible_subsets(boundary_size, parity)
    values: dict[Subset, Fraction] = {}
    for gamma in all_subsets(boundary_size):
        value = Fraction(p.get(gamma, 0))
        if value < 0:
            raise PreconditionError(f"count for {sorted(gamma)} is negative: {value}")
        if gamma not in feasible and value != 0:
            raise PreconditionError(
                f"subset {sorted(gamma)} has the wrong parity for |B| {parity.value} "
                f"but count {value}"
            )
        if gamma in feasible and gamma not in p:
            raise PreconditionError(f"missing count for subset {sorted(gamma)}")
        values[gamma] = value

    graph, scale, variant = _FAMILIES[(boundary_size, parity)](values)
    gadget = MatchgateGadget(
        boundary_size=boundary_size, parity=parity, graph=graph, scale=scale, variant=variant
    )
    for gamma, want in values.items():
        got = gadget.realized(gamma)
        if got != want:
            raise ContractViolation(
                f"{variant} gadget realizes {got} for {sorted(gamma)}, expected {want}"
            )
    if not is_planar_graph(graph):
        raise ContractViolation(f"{variant} gadget is not planar")
    logger.debug(f"Matchgate {variant} for |S|={boundary_size}, |B| {parity.value}, scale {scale}")
    return gadget
