"""Instance generators: grids, elementary walls, apex grids."""

import math
from dataclasses import dataclass

from .errors import InputError
from .graph import Graph, VertexSet

Coord = tuple[int, int]


def generate_grid(k: int, r: int) -> Graph:
    """k x r grid, vertex (i, j) numbered i*r + j."""
    if k < 1 or r < 1:
        raise InputError(f"grid dimensions must be positive, got {k}x{r}")
    edges = []
    for i in range(k):
        for j in range(r):
            v = i * r + j
            if j + 1 < r:
                edges.append((v, v + 1))
            if i + 1 < k:
                edges.append((v, v + r))
    return Graph(k * r, edges)


def generate_apex_grid(k: int) -> Graph:
    """k x k grid plus a universal vertex numbered k*k."""
    grid = generate_grid(k, k)
    apex = grid.n
    return Graph(grid.n + 1, list(grid.edges) + [(v, apex) for v in range(grid.n)])


@dataclass(frozen=True)
class WallLayout:
    """An elementary r-wall with its named parts."""

    height: int
    graph: Graph
    coordinates: tuple[Coord, ...]
    perimeter: tuple[int, ...]
    pegs: VertexSet
    corners: tuple[int, ...]
    layers: tuple[tuple[int, ...], ...]
    central: tuple[int, ...]


def _faces_from_coordinates(
    adjacency: dict[Coord, set[Coord]],
) -> list[list[Coord]]:
    """Faces of the straight-line drawing given by the coordinates."""
    rotation: dict[Coord, list[Coord]] = {}
    for v, nbrs in adjacency.items():
        rotation[v] = sorted(nbrs, key=lambda u: math.atan2(u[1] - v[1], u[0] - v[0]))
    visited: set[tuple[Coord, Coord]] = set()
    faces = []
    for v in sorted(adjacency):
        for u in rotation[v]:
            if (v, u) in visited:
                continue
            face = []
            a, b = v, u
            while (a, b) not in visited:
                visited.add((a, b))
                face.append(a)
                order = rotation[b]
                a, b = b, order[(order.index(a) - 1) % len(order)]
            faces.append(face)
    return faces


def _outer_cycle(adjacency: dict[Coord, set[Coord]]) -> list[Coord]:
    faces = _faces_from_coordinates(adjacency)
    return max(faces, key=lambda f: (len(f), sorted(f)))


def _prune_leaves(adjacency: dict[Coord, set[Coord]]) -> None:
    while True:
        leaves = [v for v, nbrs in adjacency.items() if len(nbrs) <= 1]
        if not leaves:
            return
        for v in leaves:
            for u in adjacency.pop(v):
                if u in adjacency:
                    adjacency[u].discard(v)


def wall_layout(r: int) -> WallLayout:
    """Elementary r-wall from the (2r x r)-grid with alternating vertical edges removed."""
    if r < 3 or r % 2 == 0:
        raise InputError(f"wall height must be odd and at least 3, got {r}")

    adjacency: dict[Coord, set[Coord]] = {
        (x, y): set() for x in range(1, 2 * r + 1) for y in range(1, r + 1)
    }
    for x in range(1, 2 * r + 1):
        for y in range(1, r + 1):
            if x < 2 * r:
                adjacency[(x, y)].add((x + 1, y))
                adjacency[(x + 1, y)].add((x, y))
            if y < r and (x + y) % 2 == 0:
                adjacency[(x, y)].add((x, y + 1))
                adjacency[(x, y + 1)].add((x, y))
    _prune_leaves(adjacency)

    coords = sorted(adjacency, key=lambda c: (c[1], c[0]))
    index = {c: i for i, c in enumerate(coords)}
    edges = {
        (min(index[a], index[b]), max(index[a], index[b]))
        for a, nbrs in adjacency.items()
        for b in nbrs
    }
    graph = Graph(len(coords), sorted(edges))

    outer = _outer_cycle(adjacency)
    perimeter = tuple(index[c] for c in outer)
    pegs = frozenset(v for v in perimeter if graph.degree(v) == 2)
    corner_coords = [(1, 1), (2, r), (2 * r - 1, 1), (2 * r, r)]
    corners = tuple(index[c] for c in corner_coords)

    layers = [perimeter]
    remaining = {v: set(nbrs) for v, nbrs in adjacency.items()}
    current = outer
    for _ in range((r - 1) // 2 - 1):
        for c in current:
            for u in remaining.pop(c):
                if u in remaining:
                    remaining[u].discard(c)
        _prune_leaves(remaining)
        if not remaining:
            break
        current = _outer_cycle(remaining)
        layers.append(tuple(index[c] for c in current))

    middle = (r + 1) // 2
    central = (index[(r, middle)], index[(r + 1, middle)])

    return WallLayout(
        height=r,
        graph=graph,
        coordinates=tuple(coords),
        perimeter=perimeter,
        pegs=pegs,
        corners=corners,
        layers=tuple(layers),
        central=central,
    )


def generate_wall(r: int) -> Graph:
    return wall_layout(r).graph
