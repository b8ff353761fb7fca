"""Immutable undirected graphs, vertex sets, separations and torsos."""

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Union

import networkx as nx

from .errors import InputError

VertexSet = frozenset[int]
Edge = tuple[int, int]
WeightLike = Union[int, Fraction, str]

ONE = Fraction(1)


def bits(mask: int) -> Iterator[int]:
    """Yield the vertex indices set in a bitmask, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def from_mask(mask: int) -> VertexSet:
    return frozenset(bits(mask))


def _edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def _as_fraction(value: WeightLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


class Graph:
    """Undirected simple graph on vertices 0..n-1 with optional rational edge weights.

    Edges without an explicit weight have weight 1. Instances are immutable.
    """

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]] = (),
        weights: Optional[Mapping[tuple[int, int], WeightLike]] = None,
    ):
        if n < 0:
            raise InputError(f"vertex count must be non-negative, got {n}")
        adj: list[set[int]] = [set() for _ in range(n)]
        edge_set: set[Edge] = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            key = _edge_key(u, v)
            if key in edge_set:
                raise InputError(f"parallel edge ({u}, {v})")
            edge_set.add(key)
            adj[u].add(v)
            adj[v].add(u)

        normalized: dict[Edge, Fraction] = {}
        for (u, v), raw in (weights or {}).items():
            key = _edge_key(u, v)
            if key not in edge_set:
                raise InputError(f"weight given for missing edge ({u}, {v})")
            w = _as_fraction(raw)
            if w < 0:
                raise InputError(f"negative weight {w} on edge ({u}, {v})")
            if w != ONE:
                normalized[key] = w

        self._n = n
        self._edges: tuple[Edge, ...] = tuple(sorted(edge_set))
        self._weights = normalized
        self._adj: tuple[VertexSet, ...] = tuple(frozenset(a) for a in adj)

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def vertices(self) -> range:
        return range(self._n)

    @property
    def edges(self) -> tuple[Edge, ...]:
        """Edges as sorted (u, v) pairs with u < v."""
        return self._edges

    @property
    def is_weighted(self) -> bool:
        return bool(self._weights)

    @property
    def explicit_weights(self) -> dict[Edge, Fraction]:
        """Weights that differ from 1."""
        return dict(self._weights)

    def neighbors(self, v: int) -> VertexSet:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def weight(self, u: int, v: int) -> Fraction:
        if v not in self._adj[u]:
            raise KeyError((u, v))
        return self._weights.get(_edge_key(u, v), ONE)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Adjacency bitmask per vertex."""
        return tuple(to_mask(a) for a in self._adj)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self._n) - 1

    def to_networkx(self) -> nx.Graph:
        """Fresh networkx copy with every vertex and a Fraction `weight` on each edge."""
        graph = nx.Graph()
        graph.add_nodes_from(range(self._n))
        for u, v in self._edges:
            graph.add_edge(u, v, weight=self.weight(u, v))
        return graph

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._n == other._n
            and self._edges == other._edges
            and self._weights == other._weights
        )

    def __hash__(self) -> int:
        return hash((self._n, self._edges, tuple(sorted(self._weights.items()))))

    def __repr__(self) -> str:
        suffix = ", weighted" if self._weights else ""
        return f"Graph(n={self._n}, m={self.m}{suffix})"


@dataclass(frozen=True)
class Separation:
    """Ordered pair (left, right) covering V(G) with no edge between the private sides."""

    left: VertexSet
    right: VertexSet

    @property
    def order(self) -> int:
        return len(self.left & self.right)

    @property
    def boundary(self) -> VertexSet:
        return self.left & self.right

    def is_valid(self, g: Graph) -> bool:
        if self.left | self.right != frozenset(g.vertices):
            return False
        private_left = self.left - self.right
        private_right = self.right - self.left
        return all(not (g.neighbors(v) & private_right) for v in private_left)


@dataclass(frozen=True)
class MinorModel:
    """Branch sets in the host, one per pattern vertex."""

    branch_sets: Mapping[int, VertexSet]

    def is_valid(self, host: Graph, pattern: Graph) -> bool:
        seen: set[int] = set()
        for x in pattern.vertices:
            branch = self.branch_sets.get(x)
            if not branch or seen & branch:
                return False
            if len(components_within(host, branch)) != 1:
                return False
            seen |= branch
        for x, y in pattern.edges:
            if not any(host.neighbors(u) & self.branch_sets[y] for u in self.branch_sets[x]):
                return False
        return True


def components_in_mask(g: Graph, mask: int) -> list[int]:
    """Connected components of g[mask] as bitmasks, ordered by lowest vertex."""
    masks = g.masks
    comps: list[int] = []
    rest = mask
    while rest:
        comp = rest & -rest
        frontier = comp
        while frontier:
            grown = 0
            for v in bits(frontier):
                grown |= masks[v]
            grown &= rest & ~comp
            comp |= grown
            frontier = grown
        comps.append(comp)
        rest &= ~comp
    return comps


def components_within(g: Graph, vertices: Iterable[int]) -> list[VertexSet]:
    return [from_mask(c) for c in components_in_mask(g, to_mask(vertices))]


def connected_components(g: Graph) -> list[VertexSet]:
    """Vertex sets of the connected components, ordered by their lowest vertex."""
    return [from_mask(c) for c in components_in_mask(g, g.full_mask)]


def is_connected(g: Graph) -> bool:
    return g.n == 0 or len(components_in_mask(g, g.full_mask)) == 1


def neighborhood_mask(g: Graph, mask: int) -> int:
    masks = g.masks
    out = 0
    for v in bits(mask):
        out |= masks[v]
    return out & ~mask


def neighborhood(g: Graph, x: Iterable[int]) -> VertexSet:
    """Open neighborhood N_g(x)."""
    return from_mask(neighborhood_mask(g, to_mask(x)))


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """g[vertices] renumbered by increasing original index, plus the new-to-old label map."""
    labels = tuple(sorted(set(vertices)))
    index = {old: new for new, old in enumerate(labels)}
    edges = []
    weights: dict[Edge, Fraction] = {}
    for u, v in g.edges:
        if u in index and v in index:
            e = (index[u], index[v])
            edges.append(e)
            w = g.weight(u, v)
            if w != ONE:
                weights[e] = w
    return Graph(len(labels), edges, weights), labels


def remove_vertices(g: Graph, x: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    removed = set(x)
    return induced_subgraph(g, (v for v in g.vertices if v not in removed))


def torso_edges(g: Graph, x: Iterable[int]) -> set[Edge]:
    """Edges of torso(g, x) in the original vertex numbering."""
    x_mask = to_mask(x)
    edges: set[Edge] = set()
    for u, v in g.edges:
        if x_mask >> u & 1 and x_mask >> v & 1:
            edges.add((u, v))
    for comp in components_in_mask(g, g.full_mask & ~x_mask):
        boundary = sorted(bits(neighborhood_mask(g, comp)))
        for i, u in enumerate(boundary):
            for v in boundary[i + 1:]:
                edges.add((u, v))
    return edges


def torso(g: Graph, x: Iterable[int]) -> Graph:
    """torso(g, x) renumbered by increasing original index; weights are dropped.

    Edges of g[x] plus a clique on N_g(C) for each component C of g - x.
    """
    labels = sorted(set(x))
    index = {old: new for new, old in enumerate(labels)}
    edges = [(index[u], index[v]) for u, v in torso_edges(g, labels)]
    return Graph(len(labels), edges)


def disjoint_union(*graphs: Graph) -> Graph:
    """Disjoint union, numbering each graph's vertices after the previous ones."""
    offset = 0
    edges: list[Edge] = []
    weights: dict[Edge, Fraction] = {}
    for part in graphs:
        for u, v in part.edges:
            e = (u + offset, v + offset)
            edges.append(e)
            w = part.weight(u, v)
            if w != ONE:
                weights[e] = w
        offset += part.n
    return Graph(offset, edges, weights)


def add_edges(
    g: Graph,
    edges: Iterable[tuple[int, int]],
    weights: Optional[Mapping[tuple[int, int], WeightLike]] = None,
    extra_vertices: int = 0,
) -> Graph:
    """Copy of g with new vertices appended and new edges added."""
    merged: dict[Edge, Fraction] = dict(g.explicit_weights)
    for (u, v), w in (weights or {}).items():
        merged[_edge_key(u, v)] = _as_fraction(w)
    return Graph(g.n + extra_vertices, list(g.edges) + list(edges), merged)


def with_weights(g: Graph, weights: Mapping[tuple[int, int], WeightLike]) -> Graph:
    return Graph(g.n, g.edges, weights)


def complete_graph(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InputError(f"cycle needs at least 3 vertices, got {n}")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_bipartite_graph(a: int, b: int) -> Graph:
    return Graph(a + b, [(u, a + v) for u in range(a) for v in range(b)])


def from_networkx(graph: nx.Graph) -> tuple[Graph, tuple]:
    """Convert a networkx graph; vertices are numbered by sorted node label."""
    labels = tuple(sorted(graph.nodes))
    index = {old: new for new, old in enumerate(labels)}
    edges = []
    weights: dict[Edge, Fraction] = {}
    for u, v, data in graph.edges(data=True):
        e = (index[u], index[v])
        edges.append(e)
        if "weight" in data:
            weights[e] = _as_fraction(data["weight"])
    return Graph(len(labels), edges, weights), labels
