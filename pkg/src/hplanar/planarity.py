"""Planarity testing, rotation systems, planar coloring and few-layer tree decompositions."""

import logging
from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Optional, Union

import networkx as nx
from networkx.algorithms.planar_drawing import triangulate_embedding

from .config import DEFAULT_COLOR_CEILING
from .errors import ContractViolation, InputError, PreconditionError
from .exact import find_coloring
from .graph import Edge, Graph, VertexSet, connected_components
from .treedec import TreeDecomposition, chain, verify_tree_decomposition

logger = logging.getLogger(__name__)

Dart = tuple[int, int]

# few_layer_tree_decomposition guarantees width <= 3 * layers + FEW_LAYER_WIDTH_OFFSET
FEW_LAYER_WIDTH_OFFSET = -1


@dataclass(frozen=True)
class RotationSystem:
    """Clockwise cyclic order of neighbours around each vertex."""

    order: Mapping[int, tuple[int, ...]]

    @classmethod
    def from_embedding(cls, embedding: nx.PlanarEmbedding) -> "RotationSystem":
        data = embedding.get_data()
        return cls(order={v: tuple(nbrs) for v, nbrs in data.items()})

    @classmethod
    def from_json(cls, raw: Mapping[str, Iterable[int]]) -> "RotationSystem":
        try:
            return cls(order={int(v): tuple(int(u) for u in nbrs) for v, nbrs in raw.items()})
        except (TypeError, ValueError) as e:
            raise InputError(f"malformed rotation system: {e}") from e

    def to_json(self) -> dict[str, list[int]]:
        return {str(v): list(nbrs) for v, nbrs in sorted(self.order.items())}

    def edge_set(self) -> set[Edge]:
        return {(min(u, v), max(u, v)) for u, nbrs in self.order.items() for v in nbrs}

    def next_dart(self, dart: Dart) -> Dart:
        u, v = dart
        around = self.order[v]
        return v, around[(around.index(u) - 1) % len(around)]

    def face_darts(self) -> list[list[Dart]]:
        """Faces as dart cycles, traced in a deterministic order."""
        seen: set[Dart] = set()
        faces: list[list[Dart]] = []
        for v in sorted(self.order):
            for u in self.order[v]:
                if (v, u) in seen:
                    continue
                face: list[Dart] = []
                dart = (v, u)
                while dart not in seen:
                    seen.add(dart)
                    face.append(dart)
                    dart = self.next_dart(dart)
                faces.append(face)
        return faces

    def faces(self) -> list[list[int]]:
        """Faces as boundary walks of vertices."""
        return [[u for u, _ in face] for face in self.face_darts()]

    def triangle_sides(self, triangle: tuple[int, int, int]) -> tuple[VertexSet, VertexSet]:
        """Vertices on the two sides of the 3-cycle a-b-c in this embedding.

        At each corner the clockwise arc from the next corner to the previous one faces the
        same side of the cycle; the arcs seed both sides and the rest is reached off the cycle.
        """
        a, b, c = triangle
        cut = set(triangle)
        side_of: dict[int, int] = {}
        queue: deque[int] = deque()
        for corner, nxt, prv in ((a, b, c), (b, c, a), (c, a, b)):
            around = self.order[corner]
            start = around.index(nxt)
            side = 0
            for step in range(1, len(around)):
                u = around[(start + step) % len(around)]
                if u == prv:
                    side = 1
                elif u not in cut and side_of.setdefault(u, side) == side:
                    queue.append(u)
                elif u not in cut:
                    raise ContractViolation(f"{u} sits on both sides of triangle {triangle}")
        while queue:
            v = queue.popleft()
            for u in self.order[v]:
                if u in cut:
                    continue
                if u not in side_of:
                    side_of[u] = side_of[v]
                    queue.append(u)
                elif side_of[u] != side_of[v]:
                    raise ContractViolation(f"edge {v}-{u} crosses triangle {triangle}")
        return (
            frozenset(v for v, s in side_of.items() if s == 0),
            frozenset(v for v, s in side_of.items() if s == 1),
        )

    def restrict(self, vertices: Iterable[int]) -> "RotationSystem":
        """Rotation of the induced subgraph; the cyclic orders are inherited."""
        keep = set(vertices)
        return RotationSystem(
            order={v: tuple(u for u in self.order.get(v, ()) if u in keep) for v in keep}
        )

    def relabel(self, mapping: Mapping[int, int]) -> "RotationSystem":
        return RotationSystem(
            order={mapping[v]: tuple(mapping[u] for u in nbrs) for v, nbrs in self.order.items()}
        )

    def is_valid_for(self, g: Graph) -> bool:
        """Same edge set as g and the Euler characteristic of a sphere on each component."""
        if set(self.order) != set(g.vertices):
            return False
        for v, nbrs in self.order.items():
            if len(set(nbrs)) != len(nbrs) or set(nbrs) != set(g.neighbors(v)):
                return False
        faces = self.face_darts()
        comp_of: dict[int, int] = {}
        comps = connected_components(g)
        for i, comp in enumerate(comps):
            for v in comp:
                comp_of[v] = i
        face_count = [0] * len(comps)
        for face in faces:
            face_count[comp_of[face[0][0]]] += 1
        for i, comp in enumerate(comps):
            edges = sum(g.degree(v) for v in comp) // 2
            faces_here = face_count[i] if edges else 1
            if len(comp) - edges + faces_here != 2:
                return False
        return True


@dataclass(frozen=True)
class KuratowskiWitness:
    """A subdivision of K5 or K3,3 contained in the graph."""

    kind: str
    edges: tuple[Edge, ...]
    branch_vertices: tuple[int, ...]


@dataclass(frozen=True)
class PlanarityResult:
    planar: bool
    rotation: Optional[RotationSystem] = None
    witness: Optional[KuratowskiWitness] = None

    def __bool__(self) -> bool:
        return self.planar


def _nx_graph(vertices: Iterable[int], edges: Iterable[Edge]) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(vertices)
    graph.add_edges_from(edges)
    return graph


def planar_edges(vertex_count: int, edges: Iterable[Edge]) -> bool:
    """Planarity of a graph given as a vertex count and an edge list."""
    edges = list(edges)
    if vertex_count >= 3 and len(edges) > 3 * vertex_count - 6:
        return False
    if vertex_count <= 4:
        return True
    graph = nx.Graph()
    graph.add_edges_from(edges)
    return nx.is_planar(graph)


def is_planar_graph(g: Graph) -> bool:
    return planar_edges(g.n, g.edges)


def _witness_from(counterexample: nx.Graph) -> KuratowskiWitness:
    branch = sorted(v for v in counterexample.nodes if counterexample.degree(v) >= 3)
    kind = "K5" if len(branch) == 5 else "K3,3"
    edges = tuple(sorted((min(u, v), max(u, v)) for u, v in counterexample.edges))
    return KuratowskiWitness(kind=kind, edges=edges, branch_vertices=tuple(branch))


def is_planar(g: Graph) -> PlanarityResult:
    """Rotation system when g is planar, otherwise a Kuratowski subdivision."""
    planar, certificate = nx.check_planarity(_nx_graph(g.vertices, g.edges), counterexample=True)
    if planar:
        rotation = RotationSystem.from_embedding(certificate)
        if not rotation.is_valid_for(g):
            raise ContractViolation("embedding failed the Euler check")
        return PlanarityResult(planar=True, rotation=rotation)
    witness = _witness_from(certificate)
    logger.debug(f"{g!r} is not planar: {witness.kind} subdivision on {witness.branch_vertices}")
    return PlanarityResult(planar=False, witness=witness)


@dataclass(frozen=True)
class Coloring:
    """Proper coloring with colors 0..color_count-1, each used.

    palette is the bound the producer guarantees (4 from the exact search, 5 otherwise).
    """

    colors: tuple[int, ...]
    color_count: int
    palette: Optional[int] = None

    def is_proper(self, g: Graph) -> bool:
        return len(self.colors) == g.n and all(self.colors[u] != self.colors[v] for u, v in g.edges)


def normalize_colors(colors: Iterable[int]) -> tuple[tuple[int, ...], int]:
    """Renumber colors by first occurrence so that 0..k-1 are all used."""
    remap: dict[int, int] = {}
    out = []
    for c in colors:
        if c not in remap:
            remap[c] = len(remap)
        out.append(remap[c])
    return tuple(out), len(remap)


def _kempe_free(g: Graph, colors: list[int], v: int) -> int:
    """Free a color at v by swapping a two-colored chain; v's colored neighbours use all five."""
    colored = sorted(u for u in g.neighbors(v) if colors[u] >= 0)
    for i, a in enumerate(colored):
        for b in colored[i + 1:]:
            ca, cb = colors[a], colors[b]
            if ca == cb:
                continue
            chain_nodes = {a}
            queue = deque([a])
            while queue:
                x = queue.popleft()
                for y in g.neighbors(x):
                    if y not in chain_nodes and colors[y] in (ca, cb):
                        chain_nodes.add(y)
                        queue.append(y)
            if b in chain_nodes:
                continue
            for x in chain_nodes:
                colors[x] = cb if colors[x] == ca else ca
            if all(colors[u] != ca for u in g.neighbors(v)):
                return ca
    raise ContractViolation(f"no Kempe swap frees a color at vertex {v}")


def five_color(g: Graph) -> tuple[int, ...]:
    """Smallest-last greedy coloring repaired by Kempe swaps; at most 5 colors on planar input."""
    nx_graph = _nx_graph(g.vertices, g.edges)
    order = list(nx.algorithms.coloring.strategy_smallest_last(nx_graph, None))
    colors = [-1] * g.n
    for v in order:
        used = {colors[u] for u in g.neighbors(v) if colors[u] >= 0}
        free = [c for c in range(5) if c not in used]
        colors[v] = free[0] if free else _kempe_free(g, colors, v)
    return tuple(colors)


def planar_color(g: Graph, ceiling: Optional[int] = DEFAULT_COLOR_CEILING) -> Coloring:
    """Proper coloring of a planar graph.

    Up to `ceiling` vertices the coloring is optimal (hence at most 4 colors);
    above it the 5-coloring is returned.
    """
    if not is_planar_graph(g):
        raise PreconditionError(f"planar_color needs a planar graph, got {g!r}")
    if ceiling is None or g.n <= ceiling:
        if g.n == 0:
            return Coloring(colors=(), color_count=0, palette=4)
        k = 1 if g.m == 0 else (2 if nx.is_bipartite(_nx_graph(g.vertices, g.edges)) else 3)
        while k <= 4:
            found = find_coloring(g, k)
            if found is not None:
                colors, count = normalize_colors(found)
                return Coloring(colors=colors, color_count=count, palette=4)
            k += 1
        raise ContractViolation(f"planar graph {g!r} has no 4-coloring")
    colors, count = normalize_colors(five_color(g))
    logger.info(f"Planar coloring above ceiling {ceiling}: {count} colors (palette 5)")
    return Coloring(colors=colors, color_count=count, palette=5)


@dataclass(frozen=True)
class Layering:
    """BFS layers; unreachable vertices are kept apart."""

    layers: tuple[VertexSet, ...]
    unreachable: VertexSet = frozenset()

    def layer_of(self) -> dict[int, int]:
        return {v: i for i, layer in enumerate(self.layers) for v in layer}


def bfs_layers(g: Graph, root: Union[int, Iterable[int]]) -> Layering:
    """Layer i holds the vertices at distance exactly i from the root (or root set)."""
    roots = [root] if isinstance(root, int) else sorted(set(root))
    for r in roots:
        if not 0 <= r < g.n:
            raise PreconditionError(f"root {r} is not a vertex of {g!r}")
    dist = {r: 0 for r in roots}
    queue = deque(roots)
    while queue:
        v = queue.popleft()
        for u in sorted(g.neighbors(v)):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    depth = max(dist.values(), default=-1)
    layers = [set() for _ in range(depth + 1)]
    for v, d in dist.items():
        layers[d].add(v)
    return Layering(
        layers=tuple(frozenset(layer) for layer in layers),
        unreachable=frozenset(v for v in g.vertices if v not in dist),
    )


def _face_depths(faces: list[list[int]], outer: int) -> dict[int, int]:
    """Vertex depth when faces[outer] is the outer face: 1 on it, +1 per face crossed."""
    faces_of: dict[int, list[int]] = {}
    for i, face in enumerate(faces):
        for v in set(face):
            faces_of.setdefault(v, []).append(i)
    depth: dict[int, int] = {}
    seen_faces = {outer}
    frontier = [outer]
    level = 1
    while frontier:
        fresh: list[int] = []
        for f in frontier:
            for v in faces[f]:
                if v not in depth:
                    depth[v] = level
                    fresh.append(v)
        frontier = []
        for v in fresh:
            for f in faces_of[v]:
                if f not in seen_faces:
                    seen_faces.add(f)
                    frontier.append(f)
        level += 1
    return depth


def _component_decomposition(
    g: Graph, comp: VertexSet, rotation: RotationSystem
) -> TreeDecomposition:
    if len(comp) <= 3:
        return TreeDecomposition(bags=(frozenset(comp),))

    local = rotation.restrict(comp)
    faces = local.faces()
    best_face, best_depths = 0, _face_depths(faces, 0)
    for i in range(1, len(faces)):
        depths = _face_depths(faces, i)
        if max(depths.values()) < max(best_depths.values()):
            best_face, best_depths = i, depths

    edges = [(u, v) for u, v in g.edges if u in comp]
    root = g.n
    star = [(root, v) for v in sorted(set(faces[best_face]))]
    fans: list[Edge] = []
    for i, face in enumerate(faces):
        if i == best_face:
            continue
        hub = min(face, key=lambda v: (best_depths[v], v))
        fans.extend((hub, u) for u in sorted(set(face)) if u != hub)

    augmented = _nx_graph(sorted(comp) + [root], edges + star + fans)
    planar, embedding = nx.check_planarity(augmented)
    if not planar:
        logger.debug("Face fans broke planarity; decomposing without them")
        augmented = _nx_graph(sorted(comp) + [root], edges + star)
        planar, embedding = nx.check_planarity(augmented)
        if not planar:
            raise ContractViolation("component plus outer-face apex is not planar")
    triangulated, _ = triangulate_embedding(embedding, fully_triangulate=True)
    tri = RotationSystem.from_embedding(triangulated)

    parent: dict[int, Optional[int]] = {root: None}
    root_path: dict[int, frozenset[int]] = {root: frozenset({root})}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for u in sorted(tri.order[v]):
            if u not in parent:
                parent[u] = v
                root_path[u] = root_path[v] | {u}
                queue.append(u)

    face_list = tri.face_darts()
    face_of: dict[Dart, int] = {}
    for i, face in enumerate(face_list):
        for dart in face:
            face_of[dart] = i
    dual: list[list[int]] = [[] for _ in face_list]
    for u, nbrs in tri.order.items():
        for v in nbrs:
            if u < v and parent.get(u) != v and parent.get(v) != u:
                a, b = face_of[(u, v)], face_of[(v, u)]
                if a != b:
                    dual[a].append(b)
                    dual[b].append(a)

    tree_edges: list[tuple[int, int]] = []
    reached = {0}
    queue = deque([0])
    while queue:
        f = queue.popleft()
        for h in sorted(dual[f]):
            if h not in reached:
                reached.add(h)
                tree_edges.append((f, h))
                queue.append(h)
    if len(reached) != len(face_list):
        raise ContractViolation("dual of the cotree is disconnected")

    bags = tuple(
        frozenset().union(*(root_path[u] for u, _ in face)) - {root} for face in face_list
    )
    return TreeDecomposition(bags=bags, tree_edges=tuple(tree_edges))


def few_layer_tree_decomposition(
    g: Graph,
    layers_used: int,
    rotation: Optional[RotationSystem] = None,
) -> TreeDecomposition:
    """Tree decomposition of a planar graph of width <= 3*layers_used - 1.

    Each component gets an apex over its shallowest outer face; bags are the
    root paths of the triangles of a triangulation, joined along the dual of the cotree.
    """
    if layers_used < 1 and g.n > 0:
        raise PreconditionError(f"layers_used must be positive, got {layers_used}")
    if rotation is None:
        result = is_planar(g)
        if not result:
            raise PreconditionError(f"few_layer_tree_decomposition needs a planar graph, got {g!r}")
        rotation = result.rotation
    elif not rotation.is_valid_for(g):
        raise PreconditionError("rotation system does not embed the graph")
    assert rotation is not None

    td = chain([_component_decomposition(g, comp, rotation) for comp in connected_components(g)])
    report = verify_tree_decomposition(g, td)
    if not report:
        raise ContractViolation(f"few-layer decomposition is invalid: {report.reason}")
    bound = max(3 * layers_used + FEW_LAYER_WIDTH_OFFSET, min(g.n, 3) - 1)
    if td.width > bound:
        raise ContractViolation(
            f"few-layer decomposition has width {td.width} above bound {bound}"
        )
    return td
