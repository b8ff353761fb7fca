"""Target graph classes H: membership, structural flags and sub-solvers."""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Optional

import networkx as nx

from .config import DEFAULT_FORBIDDEN_CEILING, DEFAULT_PERFECT_CEILING
from .errors import CeilingExceeded, InputError, PreconditionError, check_ceiling
from .exact import chromatic_number, max_independent_set, min_deletion_set, pmm_bruteforce
from .fkt import fkt_pmm
from .graph import (
    Graph,
    VertexSet,
    bits,
    components_within,
    connected_components,
    induced_subgraph,
)
from .planarity import is_planar_graph, planar_color

logger = logging.getLogger(__name__)

Membership = Callable[[Graph], bool]


@dataclass(frozen=True)
class HClass:
    """A hereditary-or-not graph class with optional polynomial sub-solvers.

    max_order bounds the order of every member when the class is finite in size.
    """

    name: str
    membership: Membership
    hereditary: bool
    union_closed: bool
    max_order: Optional[int] = None
    universal: bool = False
    chromatic_solver: Optional[Callable[[Graph], int]] = None
    independent_set_solver: Optional[Callable[[Graph], VertexSet]] = None
    pmm_solver: Optional[Callable[[Graph], Fraction]] = None
    deletion_solver: Optional[Callable[[Graph, int], Optional[VertexSet]]] = None

    def contains(self, g: Graph) -> bool:
        if self.max_order is not None and g.n > self.max_order:
            return False
        return self.membership(g)

    def chromatic_number(self, g: Graph) -> int:
        if self.chromatic_solver is not None:
            return self.chromatic_solver(g)
        return chromatic_number(g)[0]

    def independent_set(self, g: Graph) -> VertexSet:
        if self.independent_set_solver is not None:
            return self.independent_set_solver(g)
        return max_independent_set(g)

    def pmm(self, g: Graph) -> Fraction:
        if self.pmm_solver is not None:
            return self.pmm_solver(g)
        return pmm_bruteforce(g)

    def min_deletion(self, g: Graph, budget: int) -> Optional[VertexSet]:
        """Smallest vertex set of size <= budget whose removal leaves a member."""
        if self.deletion_solver is not None:
            return self.deletion_solver(g, budget)
        return min_deletion_set(g, self.contains, budget)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class SizeRestrictedClass(HClass):
    """Members of base with at most k vertices."""

    base: Optional[HClass] = None
    k: int = 0


def restrict_to_size(h: HClass, k: int) -> SizeRestrictedClass:
    if k < 0:
        raise PreconditionError(f"size bound must be non-negative, got {k}")
    base_membership = h.contains
    bound = k if h.max_order is None else min(k, h.max_order)
    return SizeRestrictedClass(
        name=f"{h.name}^({k})",
        membership=lambda g: g.n <= k and base_membership(g),
        hereditary=h.hereditary,
        union_closed=False,
        max_order=bound,
        universal=False,
        chromatic_solver=h.chromatic_solver,
        independent_set_solver=h.independent_set_solver,
        pmm_solver=h.pmm_solver,
        deletion_solver=None,
        base=h,
        k=k,
    )


def _nx(g: Graph) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(g.vertices)
    graph.add_edges_from(g.edges)
    return graph


# --- membership predicates ---------------------------------------------------


def _is_edgeless(g: Graph) -> bool:
    return g.m == 0


def _is_forest(g: Graph) -> bool:
    return g.n == 0 or nx.is_forest(_nx(g))


def _is_bipartite(g: Graph) -> bool:
    return g.n == 0 or nx.is_bipartite(_nx(g))


def _is_chordal(g: Graph) -> bool:
    return g.n == 0 or nx.is_chordal(_nx(g))


def _is_cluster(g: Graph) -> bool:
    for comp in connected_components(g):
        size = len(comp)
        if sum(g.degree(v) for v in comp) != size * (size - 1):
            return False
    return True


def _is_k4(g: Graph) -> bool:
    return g.n == 4 and g.m == 6


def _has_odd_hole(masks: list[int], n: int) -> bool:
    """Induced odd cycle of length >= 5, searched from its lowest vertex."""

    def extend(path: list[int], inner: int) -> bool:
        s, last = path[0], path[-1]
        for w in bits(masks[last]):
            if w <= s or (inner >> w) & 1 or w == last:
                continue
            if masks[w] & inner:
                continue
            if (masks[w] >> s) & 1:
                if len(path) + 1 >= 5 and (len(path) + 1) % 2 == 1:
                    return True
                continue
            if extend(path + [w], inner | (1 << last)):
                return True
        return False

    for s in range(n):
        for v in bits(masks[s]):
            if v > s and extend([s, v], 0):
                return True
    return False


def is_perfect(g: Graph, ceiling: Optional[int] = DEFAULT_PERFECT_CEILING) -> bool:
    """No odd hole and no odd antihole; exhaustive search."""
    check_ceiling("is_perfect", g.n, ceiling)
    masks = list(g.masks)
    if _has_odd_hole(masks, g.n):
        return False
    full = g.full_mask
    complement = [full & ~masks[v] & ~(1 << v) for v in range(g.n)]
    return not _has_odd_hole(complement, g.n)


# --- sub-solvers ---------------------------------------------------------------


def _bipartite_chromatic(g: Graph) -> int:
    if g.n == 0:
        return 0
    return 1 if g.m == 0 else 2


def _bipartite_independent_set(g: Graph) -> VertexSet:
    """Complement of a minimum vertex cover from a maximum matching."""
    graph = _nx(g)
    sides = nx.bipartite.color(graph)
    top = {v for v, side in sides.items() if side == 0}
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=top)
    cover = nx.bipartite.to_vertex_cover(graph, matching, top_nodes=top)
    return frozenset(v for v in g.vertices if v not in cover)


def _chordal_chromatic(g: Graph) -> int:
    if g.n == 0:
        return 0
    return max(len(clique) for clique in nx.chordal_graph_cliques(_nx(g)))


def _chordal_independent_set(g: Graph) -> VertexSet:
    """Greedy on simplicial vertices; optimal on chordal graphs."""
    remaining = set(g.vertices)
    chosen: set[int] = set()
    while remaining:
        for v in sorted(remaining):
            nbrs = g.neighbors(v) & remaining
            if all(g.has_edge(a, b) for a, b in combinations(sorted(nbrs), 2)):
                chosen.add(v)
                remaining -= nbrs | {v}
                break
        else:
            raise PreconditionError("graph has no simplicial vertex; it is not chordal")
    return frozenset(chosen)


def _cluster_chromatic(g: Graph) -> int:
    return max((len(c) for c in connected_components(g)), default=0)


def _cluster_independent_set(g: Graph) -> VertexSet:
    return frozenset(min(c) for c in connected_components(g))


def _edgeless_deletion(g: Graph, budget: int) -> Optional[VertexSet]:
    keep = max_independent_set(g)
    cover = frozenset(v for v in g.vertices if v not in keep)
    return cover if len(cover) <= budget else None


def _planar_chromatic(g: Graph) -> int:
    return planar_color(g, ceiling=None).color_count


def _planar_pmm(g: Graph) -> Fraction:
    return fkt_pmm(g)


_BUILTINS: dict[str, HClass] = {
    "edgeless": HClass(
        name="edgeless",
        membership=_is_edgeless,
        hereditary=True,
        union_closed=True,
        chromatic_solver=lambda g: 0 if g.n == 0 else 1,
        independent_set_solver=lambda g: frozenset(g.vertices),
        pmm_solver=lambda g: Fraction(1 if g.n == 0 else 0),
        deletion_solver=_edgeless_deletion,
    ),
    "forests": HClass(
        name="forests",
        membership=_is_forest,
        hereditary=True,
        union_closed=True,
        chromatic_solver=_bipartite_chromatic,
        independent_set_solver=_bipartite_independent_set,
        pmm_solver=_planar_pmm,
    ),
    "bipartite": HClass(
        name="bipartite",
        membership=_is_bipartite,
        hereditary=True,
        union_closed=True,
        chromatic_solver=_bipartite_chromatic,
        independent_set_solver=_bipartite_independent_set,
    ),
    "planar": HClass(
        name="planar",
        membership=is_planar_graph,
        hereditary=True,
        union_closed=True,
        chromatic_solver=_planar_chromatic,
        pmm_solver=_planar_pmm,
    ),
    "chordal": HClass(
        name="chordal",
        membership=_is_chordal,
        hereditary=True,
        union_closed=True,
        chromatic_solver=_chordal_chromatic,
        independent_set_solver=_chordal_independent_set,
    ),
    "cluster": HClass(
        name="cluster",
        membership=_is_cluster,
        hereditary=True,
        union_closed=True,
        chromatic_solver=_cluster_chromatic,
        independent_set_solver=_cluster_independent_set,
    ),
    "complete_K4_only": HClass(
        name="complete_K4_only",
        membership=_is_k4,
        hereditary=False,
        union_closed=False,
        max_order=4,
        chromatic_solver=lambda g: g.n,
        independent_set_solver=lambda g: frozenset([0]) if g.n else frozenset(),
        pmm_solver=pmm_bruteforce,
    ),
    "all_graphs": HClass(
        name="all_graphs",
        membership=lambda g: True,
        hereditary=True,
        union_closed=True,
        universal=True,
    ),
    "perfect": HClass(
        name="perfect",
        membership=is_perfect,
        hereditary=True,
        union_closed=True,
    ),
}

BUILTIN_NAMES = tuple(_BUILTINS)


def builtin(name: str) -> HClass:
    try:
        return _BUILTINS[name]
    except KeyError:
        raise InputError(
            f"unknown class {name!r}; expected one of {', '.join(BUILTIN_NAMES)}"
        ) from None


def resolve_hclass(name: str, size: Optional[int] = None) -> HClass:
    """Class by CLI name, optionally restricted to graphs of at most `size` vertices."""
    h = builtin(name)
    return h if size is None else restrict_to_size(h, size)


def _canonical_code(n: int, edges: tuple[tuple[int, int], ...]) -> tuple[tuple[int, int], ...]:
    best: Optional[tuple[tuple[int, int], ...]] = None
    for perm in permutations(range(n)):
        code = tuple(sorted((min(perm[u], perm[v]), max(perm[u], perm[v])) for u, v in edges))
        if best is None or code < best:
            best = code
    return best or ()


def min_forbidden_subgraph(
    h: HClass, ceiling: Optional[int] = DEFAULT_FORBIDDEN_CEILING
) -> Optional[Graph]:
    """Smallest graph outside h: fewest vertices, then fewest edges, then least canonical code.

    None when h is universal. Raises CeilingExceeded when nothing is found within
    `ceiling` vertices (inconclusive).
    """
    if h.universal:
        return None
    limit = DEFAULT_FORBIDDEN_CEILING if ceiling is None else ceiling
    for n in range(limit + 1):
        pairs = list(combinations(range(n), 2))
        for m in range(len(pairs) + 1):
            outside = [
                edges
                for edges in combinations(pairs, m)
                if not h.contains(Graph(n, edges))
            ]
            if outside:
                code = min(_canonical_code(n, edges) for edges in outside)
                forbidden = Graph(n, code)
                logger.debug(f"Minimal non-member of {h.name}: {forbidden!r} edges={list(code)}")
                return forbidden
    raise CeilingExceeded("min_forbidden_subgraph", limit + 1, limit)


def members_of_components(g: Graph, h: HClass, vertices: VertexSet) -> list[tuple[VertexSet, bool]]:
    """Each component of g[vertices] with its membership verdict."""
    out = []
    for comp in components_within(g, vertices):
        sub, _ = induced_subgraph(g, comp)
        out.append((comp, h.contains(sub)))
    return out
