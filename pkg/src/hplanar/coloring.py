"""Additive-error colorings: leaf components share one palette, the planar part gets its own."""

import logging
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any, Optional, Union

from .config import DEFAULT_COLOR_CEILING
from .decomposition import (
    BagTag,
    EliminationSequence,
    PlanarWidthDecomposition,
    bag_torso_edges,
    verify_elimination_sequence,
    verify_planar_width,
)
from .errors import ContractViolation, PreconditionError
from .exact import find_coloring
from .graph import Graph, VertexSet, components_within, induced_subgraph, torso_edges
from .hclasses import HClass
from .modulator import PlanarModulator, verify_planar_modulator
from .planarity import Coloring, normalize_colors, planar_color

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CertifiedColoring:
    """A proper coloring with the bound it was produced under.

    component_colors is the largest chromatic number among the leaf components,
    planar_colors the colors actually spent outside them and additive the constant
    the producer certifies for that side.
    """

    coloring: Coloring
    component_colors: int
    planar_colors: int
    additive: int
    palette: int

    @property
    def bound(self) -> int:
        return self.component_colors + self.additive

    def to_json(self) -> dict[str, Any]:
        return {
            "colors": list(self.coloring.colors),
            "color_count": self.coloring.color_count,
            "component_colors": self.component_colors,
            "planar_colors": self.planar_colors,
            "additive": self.additive,
            "palette": self.palette,
            "bound": self.bound,
        }


def _color_leaves(
    g: Graph, h: HClass, leaves: Iterable[VertexSet], colors: list[int], offset: int
) -> int:
    """Color every leaf component optimally from offset on; returns the largest count used."""
    widest = 0
    for comp in leaves:
        sub, labels = induced_subgraph(g, comp)
        chi = h.chromatic_number(sub)
        found = find_coloring(sub, chi)
        if found is None:
            raise ContractViolation(f"{h.name} solver reports chi={chi} but no such coloring exists")
        for v, c in zip(labels, found):
            colors[v] = offset + c
        widest = max(widest, chi)
    return widest


def _finish(
    g: Graph,
    colors: list[int],
    component_colors: int,
    planar_colors: int,
    additive: int,
    palette: int,
) -> CertifiedColoring:
    normalized, count = normalize_colors(colors)
    coloring = Coloring(colors=normalized, color_count=count, palette=palette)
    if not coloring.is_proper(g):
        raise ContractViolation("produced coloring is not proper")
    return CertifiedColoring(
        coloring=coloring,
        component_colors=component_colors,
        planar_colors=planar_colors,
        additive=additive,
        palette=palette,
    )


def additive_color(
    g: Graph,
    h: HClass,
    x: Union[PlanarModulator, VertexSet],
    ceiling: Optional[int] = DEFAULT_COLOR_CEILING,
) -> CertifiedColoring:
    """Color g with at most chi(components) + 4 colors (+5 above the exact-coloring ceiling)."""
    x_set = x.x if isinstance(x, PlanarModulator) else frozenset(x)
    report = verify_planar_modulator(g, h, x_set)
    if not report:
        raise PreconditionError(f"not a planar {h.name}-modulator: {report.reason}")
    colors = [-1] * g.n
    leaves = components_within(g, (v for v in g.vertices if v not in x_set))
    component_colors = _color_leaves(g, h, leaves, colors, offset=0)

    planar_part, labels = induced_subgraph(g, x_set)
    planar = planar_color(planar_part, ceiling=ceiling)
    palette = planar.palette or 5
    for v, c in zip(labels, planar.colors):
        colors[v] = component_colors + c
    if palette == 5:
        logger.warning(f"Modulator of {len(x_set)} vertices colored with palette 5")
    return _finish(g, colors, component_colors, planar.color_count, palette, palette)


def ptd_color(
    g: Graph,
    h: HClass,
    seq: EliminationSequence,
    ceiling: Optional[int] = DEFAULT_COLOR_CEILING,
) -> CertifiedColoring:
    """One planar palette per layer of the elimination sequence."""
    report = verify_elimination_sequence(g, h, seq)
    if not report:
        raise PreconditionError(f"elimination sequence rejected: {report.reason}")
    colors = [-1] * g.n
    removed = frozenset().union(*seq.layers) if seq.layers else frozenset()
    leaves = components_within(g, (v for v in g.vertices if v not in removed))
    offset = _color_leaves(g, h, leaves, colors, offset=0)
    component_colors = offset
    palette = 4
    for layer in seq.layers:
        part, labels = induced_subgraph(g, layer)
        planar = planar_color(part, ceiling=ceiling)
        palette = max(palette, planar.palette or 5)
        for v, c in zip(labels, planar.colors):
            colors[v] = offset + c
        offset += planar.color_count
    additive = palette * seq.depth
    return _finish(g, colors, component_colors, offset - component_colors, additive, palette)


def _extend_bag(
    bag_graph: Graph,
    labels: tuple[int, ...],
    colors: list[int],
    tag: BagTag,
    width: int,
    ceiling: Optional[int],
) -> int:
    """Color the uncolored vertices of one bag; the colored ones form a clique.

    Returns the palette the bag needed.
    """
    if tag is BagTag.SMALL:
        for i, v in enumerate(labels):
            if colors[v] >= 0:
                continue
            taken = {colors[labels[u]] for u in bag_graph.neighbors(i) if colors[labels[u]] >= 0}
            colors[v] = next(c for c in range(width + 1) if c not in taken)
        return width + 1

    planar = planar_color(bag_graph, ceiling=ceiling)
    target = max(planar.palette or 5, width + 1)
    # rename planar colors so that the precolored adhesion keeps its colors
    rename: dict[int, int] = {}
    for i, v in enumerate(labels):
        if colors[v] >= 0:
            rename[planar.colors[i]] = colors[v]
    free = iter(c for c in range(target) if c not in set(rename.values()))
    for c in range(planar.color_count):
        if c not in rename:
            rename[c] = next(free)
    for i, v in enumerate(labels):
        if colors[v] < 0:
            colors[v] = rename[planar.colors[i]]
    return target


def ptw_color(
    g: Graph,
    h: HClass,
    pw: PlanarWidthDecomposition,
    width: int,
    ceiling: Optional[int] = DEFAULT_COLOR_CEILING,
) -> CertifiedColoring:
    """At most chi(components) + max(4, width + 1) colors along a planar-width decomposition.

    Bags are visited from node 0 outwards; the colored part of each bag is its
    adhesion with the parent, which is a clique of the bag torso.
    """
    if pw.x is None:
        raise PreconditionError("planar-width coloring needs a decomposition of a modulator torso")
    report = verify_planar_width(g, pw, width, h)
    if not report:
        raise PreconditionError(f"planar-width decomposition rejected: {report.reason}")
    colors = [-1] * g.n
    offset = _color_leaves(g, h, pw.leaf_components, colors, offset=0)

    torso_graph = Graph(g.n, torso_edges(g, pw.x))
    td = pw.base
    adjacency = td.neighbors()
    planar = [-1] * g.n
    needed = width + 1
    seen: set[int] = set()
    for start in range(td.node_count):
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        while queue:
            node = queue.popleft()
            bag_edges = bag_torso_edges(torso_graph, td, node)
            labels = tuple(sorted(td.bags[node]))
            index = {v: i for i, v in enumerate(labels)}
            bag_graph = Graph(len(labels), [(index[u], index[v]) for u, v in bag_edges])
            needed = max(needed, _extend_bag(bag_graph, labels, planar, pw.tags[node], width, ceiling))
            for nxt in adjacency[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    for v in pw.x:
        colors[v] = offset + planar[v]
    palette = max(4, needed)
    spent = len({planar[v] for v in pw.x})
    return _finish(g, colors, offset, spent, palette, palette)
