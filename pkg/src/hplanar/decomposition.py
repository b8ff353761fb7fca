"""Certificates for H-tree decompositions, planar treewidth and planar treedepth.

Every certificate type has a total verifier; the exact solvers are exhaustive
and memoize on bitmask encodings of vertex sets.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import TYPE_CHECKING, Any, Optional

from .config import DEFAULT_PTD_CEILING, DEFAULT_SUBSET_CEILING
from .errors import InputError, check_ceiling
from .graph import (
    Edge,
    Graph,
    VertexSet,
    bits,
    components_in_mask,
    from_mask,
    induced_subgraph,
    neighborhood_mask,
    to_mask,
    torso_edges,
)
from .planarity import planar_edges
from .separations import split_components
from .treedec import (
    TreeDecomposition,
    VerificationReport,
    chain,
    is_tree,
    verify_tree_decomposition,
)

if TYPE_CHECKING:
    from .hclasses import HClass

logger = logging.getLogger(__name__)

__all__ = [
    "BagTag",
    "EliminationSequence",
    "HTreeDecomposition",
    "PlanarTreedepthResult",
    "PlanarWidthDecomposition",
    "TreeDecomposition",
    "VerificationReport",
    "adhesions",
    "bag_torso_edges",
    "h_tree_decomposition_from_modulator",
    "h_tree_decomposition_verify",
    "planar_treedepth_exact",
    "planar_treewidth_exact",
    "planar_width_from_modulator",
    "quasi_4_connected",
    "torso_planar_within",
    "treedepth_exact",
    "treewidth_exact",
    "verify_elimination_sequence",
    "verify_planar_width",
    "verify_tree_decomposition",
]


def _contains(h: "HClass", g: Graph, mask: int) -> bool:
    sub, _ = induced_subgraph(g, bits(mask))
    return h.contains(sub)


def torso_planar_within(g: Graph, region: int, x_mask: int) -> bool:
    """Is torso(g[region], x) planar? Both arguments are bitmasks, x within region."""
    edges: list[Edge] = [
        (u, v) for u, v in g.edges if (x_mask >> u) & 1 and (x_mask >> v) & 1
    ]
    for comp in components_in_mask(g, region & ~x_mask):
        boundary = sorted(bits(neighborhood_mask(g, comp) & x_mask))
        edges.extend(combinations(boundary, 2))
    return planar_edges(x_mask.bit_count(), set(edges))


# --- tree H-decompositions ---------------------------------------------------


@dataclass(frozen=True)
class HTreeDecomposition:
    """Tree decomposition of torso(g, x) plus the components of g - x hanging off it."""

    base: TreeDecomposition
    x: VertexSet
    leaf_components: tuple[VertexSet, ...] = ()

    @property
    def width(self) -> int:
        return self.base.width

    def to_json(self) -> dict[str, Any]:
        payload = self.base.to_json()
        payload["x"] = sorted(self.x)
        payload["leaf_components"] = [sorted(c) for c in self.leaf_components]
        return payload


def h_tree_decomposition_verify(
    g: Graph, h: "HClass", htd: HTreeDecomposition
) -> VerificationReport:
    if any(not 0 <= v < g.n for v in htd.x):
        return VerificationReport(False, "x contains a vertex outside the graph")
    for i, bag in enumerate(htd.base.bags):
        if not bag <= htd.x:
            return VerificationReport(False, f"bag {i} leaves x")
    torso_graph = Graph(g.n, torso_edges(g, htd.x))
    report = verify_tree_decomposition(torso_graph, htd.base, vertices=htd.x)
    if not report:
        return VerificationReport(False, f"base decomposition: {report.reason}")

    x_mask = to_mask(htd.x)
    expected = {from_mask(c) for c in components_in_mask(g, g.full_mask & ~x_mask)}
    if set(htd.leaf_components) != expected or len(htd.leaf_components) != len(expected):
        return VerificationReport(False, "leaf components differ from the components of g - x")
    for comp in htd.leaf_components:
        if not _contains(h, g, to_mask(comp)):
            return VerificationReport(
                False, f"leaf component {sorted(comp)} is not in {h.name}", {"component": comp}
            )
        boundary = from_mask(neighborhood_mask(g, to_mask(comp)))
        if not any(boundary <= bag for bag in htd.base.bags) and boundary:
            return VerificationReport(
                False,
                f"neighborhood {sorted(boundary)} of a leaf component is in no bag",
                {"component": comp},
            )
    return VerificationReport(True, details={"width": htd.width})


def h_tree_decomposition_from_modulator(
    g: Graph, x: VertexSet, base: Optional[TreeDecomposition] = None
) -> HTreeDecomposition:
    """Attach the components of g - x to a decomposition of torso(g, x).

    Without `base`, an optimal decomposition of the torso is computed exactly.
    """
    x_mask = to_mask(x)
    if base is None:
        labels = sorted(x)
        index = {old: new for new, old in enumerate(labels)}
        torso_graph = Graph(len(labels), [(index[u], index[v]) for u, v in torso_edges(g, labels)])
        base = treewidth_exact(torso_graph).relabel(labels)
    leaves = tuple(from_mask(c) for c in components_in_mask(g, g.full_mask & ~x_mask))
    return HTreeDecomposition(base=base, x=frozenset(x), leaf_components=leaves)


# --- planar treedepth --------------------------------------------------------


@dataclass(frozen=True)
class EliminationSequence:
    """Successive planar modulators X_1..X_k; the residue lies in H (or is empty)."""

    layers: tuple[VertexSet, ...]

    @property
    def depth(self) -> int:
        return len(self.layers)

    def to_json(self) -> dict[str, Any]:
        return {"layers": [sorted(layer) for layer in self.layers], "depth": self.depth}

    @classmethod
    def from_json(cls, raw: Any) -> "EliminationSequence":
        if not isinstance(raw, dict) or not isinstance(raw.get("layers"), list):
            raise InputError("elimination sequence JSON needs a 'layers' list")
        try:
            return cls(layers=tuple(frozenset(int(v) for v in layer) for layer in raw["layers"]))
        except (TypeError, ValueError) as e:
            raise InputError(f"malformed elimination sequence: {e}") from e


def verify_elimination_sequence(
    g: Graph, h: Optional["HClass"], seq: EliminationSequence
) -> VerificationReport:
    """h=None demands an empty residue (pure planar treedepth)."""
    current = g.full_mask
    seen = 0
    for i, layer in enumerate(seq.layers):
        mask = to_mask(layer)
        if mask & ~g.full_mask:
            return VerificationReport(False, f"layer {i} has vertices outside the graph")
        if mask & seen:
            return VerificationReport(False, f"layer {i} overlaps an earlier layer")
        seen |= mask
        if not torso_planar_within(g, current, mask):
            return VerificationReport(
                False, f"torso of layer {i} is not planar", {"level": i}
            )
        current &= ~mask

    for comp in components_in_mask(g, current):
        if h is None:
            return VerificationReport(
                False, f"residual component {sorted(bits(comp))} remains", {"component": from_mask(comp)}
            )
        if not _contains(h, g, comp):
            return VerificationReport(
                False,
                f"residual component {sorted(bits(comp))} is not in {h.name}",
                {"component": from_mask(comp)},
            )
    return VerificationReport(True, details={"depth": seq.depth})


@dataclass(frozen=True)
class PlanarTreedepthResult:
    """value is None when the parameter exceeds k_max."""

    value: Optional[int]
    sequence: Optional[EliminationSequence] = None


def planar_treedepth_exact(
    g: Graph,
    h: Optional["HClass"] = None,
    k_max: Optional[int] = None,
    ceiling: Optional[int] = DEFAULT_PTD_CEILING,
) -> PlanarTreedepthResult:
    """Least k with an elimination sequence of depth k, searched exhaustively per component.

    With h=None the residue must be empty; otherwise residual components must lie in h.
    """
    check_ceiling("planar_treedepth_exact", g.n, ceiling)
    limit = g.n if k_max is None else k_max
    leaf = -1
    # (component, k) -> chosen layer mask, or leaf when the component already lies in h
    choice: dict[tuple[int, int], int] = {}
    failed: set[tuple[int, int]] = set()
    leaf_cache: dict[int, bool] = {}

    def in_h(comp: int) -> bool:
        if h is None:
            return False
        if comp not in leaf_cache:
            leaf_cache[comp] = _contains(h, g, comp)
        return leaf_cache[comp]

    def decide(comp: int, k: int) -> bool:
        key = (comp, k)
        if key in choice:
            return True
        if key in failed:
            return False
        if in_h(comp):
            choice[key] = leaf
            return True
        if k == 0:
            failed.add(key)
            return False
        if h is None:
            edges = [(u, v) for u, v in g.edges if (comp >> u) & 1 and (comp >> v) & 1]
            if planar_edges(comp.bit_count(), edges):
                choice[key] = comp
                return True
            if k == 1:
                failed.add(key)
                return False
        members = list(bits(comp))
        for size in range(len(members), 0, -1):
            for chosen in combinations(members, size):
                x_mask = to_mask(chosen)
                if not torso_planar_within(g, comp, x_mask):
                    continue
                if all(decide(c, k - 1) for c in components_in_mask(g, comp & ~x_mask)):
                    choice[key] = x_mask
                    return True
        failed.add(key)
        return False

    layers: list[int] = []

    def collect(comp: int, budget: int, level: int) -> None:
        x_mask = choice[(comp, budget)]
        if x_mask == leaf:
            return
        while len(layers) <= level:
            layers.append(0)
        layers[level] |= x_mask
        for child in components_in_mask(g, comp & ~x_mask):
            collect(child, budget - 1, level + 1)

    roots = components_in_mask(g, g.full_mask)
    for k in range(limit + 1):
        if all(decide(c, k) for c in roots):
            for c in roots:
                collect(c, k, 0)
            seq = EliminationSequence(layers=tuple(from_mask(m) for m in layers))
            logger.debug(f"Planar treedepth of {g!r} is {k}")
            return PlanarTreedepthResult(value=k, sequence=seq)
    logger.debug(f"Planar treedepth of {g!r} exceeds {limit}")
    return PlanarTreedepthResult(value=None)


# --- planar treewidth --------------------------------------------------------


class BagTag(Enum):
    SMALL = "small"
    PLANAR_TORSO = "planar-torso"


@dataclass(frozen=True)
class PlanarWidthDecomposition:
    """A tree decomposition whose bags are either small or have a planar torso.

    With x set, base decomposes torso(g, x) and the components of g - x are leaves.
    """

    base: TreeDecomposition
    tags: tuple[BagTag, ...]
    x: Optional[VertexSet] = None
    leaf_components: tuple[VertexSet, ...] = field(default_factory=tuple)

    def to_json(self) -> dict[str, Any]:
        payload = self.base.to_json()
        payload["tags"] = [tag.value for tag in self.tags]
        if self.x is not None:
            payload["x"] = sorted(self.x)
            payload["leaf_components"] = [sorted(c) for c in self.leaf_components]
        return payload

    @classmethod
    def from_json(cls, raw: Any) -> "PlanarWidthDecomposition":
        base = TreeDecomposition.from_json(raw)
        try:
            tags = tuple(BagTag(t) for t in raw.get("tags", []))
        except ValueError as e:
            raise InputError(f"unknown bag tag: {e}") from e
        if len(tags) != base.node_count:
            raise InputError(f"{len(tags)} tags given for {base.node_count} bags")
        x = frozenset(int(v) for v in raw["x"]) if raw.get("x") is not None else None
        leaves = tuple(frozenset(int(v) for v in c) for c in raw.get("leaf_components", []))
        return cls(base=base, tags=tags, x=x, leaf_components=leaves)


def adhesions(td: TreeDecomposition) -> dict[tuple[int, int], VertexSet]:
    """Bag intersection on every tree edge."""
    return {(a, b): td.bags[a] & td.bags[b] for a, b in td.tree_edges}


def bag_torso_edges(g: Graph, td: TreeDecomposition, node: int) -> set[Edge]:
    """g[bag] plus a clique on the adhesion with each tree neighbour."""
    bag = td.bags[node]
    edges = {(u, v) for u, v in g.edges if u in bag and v in bag}
    for a, b in td.tree_edges:
        if node in (a, b):
            shared = sorted(td.bags[a] & td.bags[b])
            edges.update(combinations(shared, 2))
    return edges


def verify_planar_width(
    g: Graph,
    pw: PlanarWidthDecomposition,
    k: int,
    h: Optional["HClass"] = None,
) -> VerificationReport:
    if len(pw.tags) != len(pw.base.bags):
        return VerificationReport(False, "one tag per bag is required")
    target = g
    required: Optional[VertexSet] = None
    if pw.x is not None:
        target = Graph(g.n, torso_edges(g, pw.x))
        required = pw.x
        if any(not bag <= pw.x for bag in pw.base.bags):
            return VerificationReport(False, "a bag leaves x")
        x_mask = to_mask(pw.x)
        expected = {from_mask(c) for c in components_in_mask(g, g.full_mask & ~x_mask)}
        if set(pw.leaf_components) != expected:
            return VerificationReport(False, "leaf components differ from the components of g - x")
        for comp in pw.leaf_components:
            if h is None or not _contains(h, g, to_mask(comp)):
                return VerificationReport(
                    False, f"leaf component {sorted(comp)} is not in the target class"
                )
    report = verify_tree_decomposition(target, pw.base, vertices=required)
    if not report:
        return VerificationReport(False, f"base decomposition: {report.reason}")

    for i, (bag, tag) in enumerate(zip(pw.base.bags, pw.tags)):
        if tag is BagTag.SMALL:
            if len(bag) > k + 1:
                return VerificationReport(
                    False, f"bag {i} tagged small has {len(bag)} > {k + 1} vertices", {"bag": i}
                )
        elif not planar_edges(len(bag), bag_torso_edges(target, pw.base, i)):
            return VerificationReport(False, f"torso of bag {i} is not planar", {"bag": i})
    return VerificationReport(True)


def planar_treewidth_exact(
    g: Graph, ceiling: Optional[int] = DEFAULT_PTD_CEILING
) -> tuple[int, PlanarWidthDecomposition]:
    """Exact planar treewidth over decompositions whose subtrees follow components.

    A state is a connected set C with its attachment N(C); the root bag of the state
    contains N(C), and the components of C minus the bag become child states.
    """
    check_ceiling("planar_treewidth_exact", g.n, ceiling)
    memo: dict[int, tuple[int, int]] = {}

    def bag_cost(bag: int, attachments: list[int]) -> int:
        edges = {(u, v) for u, v in g.edges if (bag >> u) & 1 and (bag >> v) & 1}
        for part in attachments:
            edges.update(combinations(sorted(bits(part)), 2))
        if planar_edges(bag.bit_count(), edges):
            return 0
        return bag.bit_count() - 1

    def solve(comp: int) -> int:
        if comp in memo:
            return memo[comp][0]
        attach = neighborhood_mask(g, comp)
        members = list(bits(comp))
        best = (1 << 62, 0)
        for size in range(len(members), 0, -1):
            for chosen in combinations(members, size):
                bag = to_mask(chosen) | attach
                children = components_in_mask(g, comp & ~bag)
                parts = [attach] + [neighborhood_mask(g, c) for c in children]
                cost = bag_cost(bag, parts)
                if cost >= best[0]:
                    continue
                for c in children:
                    cost = max(cost, solve(c))
                    if cost >= best[0]:
                        break
                if cost < best[0]:
                    best = (cost, bag)
        memo[comp] = best
        return best[0]

    def build(comp: int) -> TreeDecomposition:
        bag = memo[comp][1]
        parts = [build(c) for c in components_in_mask(g, comp & ~bag)]
        bags = [from_mask(bag)]
        edges: list[tuple[int, int]] = []
        for part in parts:
            offset = len(bags)
            bags.extend(part.bags)
            edges.extend((a + offset, b + offset) for a, b in part.tree_edges)
            edges.append((0, offset))
        return TreeDecomposition(bags=tuple(bags), tree_edges=tuple(edges))

    roots = components_in_mask(g, g.full_mask)
    value = max((solve(c) for c in roots), default=0)
    td = chain([build(c) for c in roots])
    tags = tuple(
        BagTag.PLANAR_TORSO if planar_edges(len(bag), bag_torso_edges(g, td, i)) else BagTag.SMALL
        for i, bag in enumerate(td.bags)
    )
    return value, PlanarWidthDecomposition(base=td, tags=tags)


def planar_width_from_modulator(
    g: Graph, x: VertexSet, ceiling: Optional[int] = DEFAULT_PTD_CEILING
) -> tuple[int, PlanarWidthDecomposition]:
    """Exact planar-width decomposition of torso(g, x) with the components of g - x as leaves."""
    labels = sorted(x)
    index = {old: new for new, old in enumerate(labels)}
    torso_graph = Graph(len(labels), [(index[u], index[v]) for u, v in torso_edges(g, labels)])
    value, local = planar_treewidth_exact(torso_graph, ceiling=ceiling)
    leaves = tuple(from_mask(c) for c in components_in_mask(g, g.full_mask & ~to_mask(x)))
    pw = PlanarWidthDecomposition(
        base=local.base.relabel(labels),
        tags=local.tags,
        x=frozenset(x),
        leaf_components=leaves,
    )
    return value, pw


# --- classical parameters ----------------------------------------------------


def treedepth_exact(
    g: Graph, ceiling: Optional[int] = DEFAULT_PTD_CEILING
) -> tuple[int, dict[int, Optional[int]]]:
    """Treedepth and an elimination forest given as a parent map."""
    check_ceiling("treedepth_exact", g.n, ceiling)
    memo: dict[int, tuple[int, int]] = {}

    def solve(comp: int) -> int:
        if comp in memo:
            return memo[comp][0]
        best = (1 << 62, -1)
        for v in bits(comp):
            rest = comp & ~(1 << v)
            depth = 1 + max((solve(c) for c in components_in_mask(g, rest)), default=0)
            if depth < best[0]:
                best = (depth, v)
        memo[comp] = best
        return best[0]

    parent: dict[int, Optional[int]] = {}

    def build(comp: int, above: Optional[int]) -> None:
        v = memo[comp][1]
        parent[v] = above
        for c in components_in_mask(g, comp & ~(1 << v)):
            build(c, v)

    roots = components_in_mask(g, g.full_mask)
    depth = max((solve(c) for c in roots), default=0)
    for c in roots:
        build(c, None)
    return depth, parent


def treewidth_exact(
    g: Graph, ceiling: Optional[int] = DEFAULT_PTD_CEILING
) -> TreeDecomposition:
    """Optimal tree decomposition from the best elimination order (subset dynamic program)."""
    check_ceiling("treewidth_exact", g.n, ceiling)
    if g.n == 0:
        return TreeDecomposition(bags=(frozenset(),))
    masks = g.masks

    def q_size(s: int, v: int) -> int:
        """Vertices outside s + v reachable from v through s."""
        seen = 1 << v
        frontier = 1 << v
        reached = 0
        while frontier:
            nxt = 0
            for u in bits(frontier):
                nxt |= masks[u]
            nxt &= ~seen
            seen |= nxt
            reached |= nxt & ~s
            frontier = nxt & s
        return reached.bit_count()

    tw: dict[int, tuple[int, int]] = {0: (-1, -1)}
    for size in range(1, g.n + 1):
        for chosen in combinations(range(g.n), size):
            s = to_mask(chosen)
            best = (1 << 62, -1)
            for v in chosen:
                prev = s & ~(1 << v)
                value = max(tw[prev][0], q_size(prev, v))
                if value < best[0]:
                    best = (value, v)
            tw[s] = best

    order: list[int] = []
    s = g.full_mask
    while s:
        v = tw[s][1]
        order.append(v)
        s &= ~(1 << v)
    order.reverse()
    return _decomposition_from_order(g, order)


def _decomposition_from_order(g: Graph, order: list[int]) -> TreeDecomposition:
    position = {v: i for i, v in enumerate(order)}
    adj = [set(g.neighbors(v)) for v in g.vertices]
    later: dict[int, set[int]] = {}
    for v in order:
        higher = {u for u in adj[v] if position[u] > position[v]}
        later[v] = higher
        for a in higher:
            adj[a] |= higher - {a}
    bags = tuple(frozenset({v} | later[v]) for v in order)
    edges: list[tuple[int, int]] = []
    roots: list[int] = []
    for i, v in enumerate(order):
        if later[v]:
            nxt = min(later[v], key=lambda u: position[u])
            edges.append((i, position[nxt]))
        else:
            roots.append(i)
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    td = TreeDecomposition(bags=bags, tree_edges=tuple(edges))
    assert is_tree(len(bags), edges)
    return td


def quasi_4_connected(g: Graph, ceiling: Optional[int] = DEFAULT_SUBSET_CEILING) -> bool:
    """3-connected, and every order-3 separation has a side with at most one private vertex."""
    check_ceiling("quasi_4_connected", g.n, ceiling)
    if g.n <= 4:
        return g.m == g.n * (g.n - 1) // 2
    full = g.full_mask
    for size in range(3):
        for separator in combinations(range(g.n), size):
            if len(components_in_mask(g, full & ~to_mask(separator))) > 1:
                return False
    for separator in combinations(range(g.n), 3):
        comps = components_in_mask(g, full & ~to_mask(separator))
        if len(comps) > 1 and split_components([c.bit_count() for c in comps], 2) is not None:
            logger.debug(f"Order-3 separator {separator} splits two sides of size >= 2")
            return False
    return True

