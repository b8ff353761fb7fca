"""Baker-style approximation of Independent Set on H-planar graphs."""

import logging
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Union

from .config import DEFAULT_PTD_CEILING
from .decomposition import (
    BagTag,
    HTreeDecomposition,
    PlanarWidthDecomposition,
    bag_torso_edges,
    h_tree_decomposition_from_modulator,
    h_tree_decomposition_verify,
    verify_planar_width,
)
from .errors import ContractViolation, PreconditionError, check_ceiling
from .exact import is_independent, max_independent_set
from .graph import (
    Graph,
    VertexSet,
    components_within,
    connected_components,
    induced_subgraph,
    neighborhood,
    torso,
    torso_edges,
)
from .hclasses import HClass
from .modulator import PlanarModulator, verify_planar_modulator
from .planarity import bfs_layers, few_layer_tree_decomposition
from .treedec import TreeDecomposition

logger = logging.getLogger(__name__)


def _leaf_independent_set(g: Graph, h: HClass, vertices: VertexSet) -> VertexSet:
    if not vertices:
        return frozenset()
    sub, labels = induced_subgraph(g, vertices)
    found = h.independent_set(sub) if h.contains(sub) else max_independent_set(sub)
    return frozenset(labels[v] for v in found)


def _independent_subsets(g: Graph, bag: list[int]) -> list[VertexSet]:
    out: list[VertexSet] = []

    def grow(i: int, chosen: frozenset[int]) -> None:
        if i == len(bag):
            out.append(chosen)
            return
        grow(i + 1, chosen)
        v = bag[i]
        if not g.neighbors(v) & chosen:
            grow(i + 1, chosen | {v})

    grow(0, frozenset())
    return out


def treedec_is_dp(
    g: Graph, htd: HTreeDecomposition, h: HClass, verify: bool = True
) -> VertexSet:
    """Maximum independent set by a subset-per-bag dynamic program over a tree H-decomposition.

    A leaf component hangs off the first bag containing its neighborhood; its share is
    the class solver applied to the component minus the neighbours of the chosen bag set.
    """
    if verify:
        report = h_tree_decomposition_verify(g, h, htd)
        if not report:
            raise PreconditionError(f"tree H-decomposition rejected: {report.reason}")
    td = htd.base
    bags = [sorted(bag) for bag in td.bags]

    hanging: list[list[VertexSet]] = [[] for _ in bags]
    free: list[VertexSet] = []
    for comp in htd.leaf_components:
        boundary = neighborhood(g, comp)
        if not boundary or not bags:
            free.append(comp)
            continue
        node = next(i for i, bag in enumerate(td.bags) if boundary <= bag)
        hanging[node].append(comp)

    leaf_cache: dict[tuple[VertexSet, VertexSet], VertexSet] = {}

    def leaf_share(comp: VertexSet, chosen: VertexSet) -> VertexSet:
        blocked = frozenset(v for v in comp if g.neighbors(v) & chosen)
        key = (comp, blocked)
        if key not in leaf_cache:
            leaf_cache[key] = _leaf_independent_set(g, h, comp - blocked)
        return leaf_cache[key]

    adjacency = td.neighbors()
    parent: dict[int, Optional[int]] = {}
    order: list[int] = []
    for start in range(len(bags)):
        if start in parent:
            continue
        parent[start] = None
        queue = deque([start])
        while queue:
            node = queue.popleft()
            order.append(node)
            for nxt in adjacency[node]:
                if nxt not in parent:
                    parent[nxt] = node
                    queue.append(nxt)
    children: dict[int, list[int]] = {node: [] for node in order}
    for node, up in parent.items():
        if up is not None:
            children[up].append(node)

    # table[node][S] = (best size below node with bag part S, chosen subset per child)
    table: list[dict[VertexSet, tuple[int, tuple[VertexSet, ...]]]] = [{} for _ in bags]
    for node in reversed(order):
        bag = td.bags[node]
        best_child: list[dict[VertexSet, tuple[int, VertexSet]]] = []
        for child in children[node]:
            per_key: dict[VertexSet, tuple[int, VertexSet]] = {}
            for sub, (value, _) in table[child].items():
                key = sub & bag
                gain = value - len(key)
                if key not in per_key or gain > per_key[key][0]:
                    per_key[key] = (gain, sub)
            best_child.append(per_key)
        for chosen in _independent_subsets(g, bags[node]):
            total = len(chosen)
            picks: list[VertexSet] = []
            feasible = True
            for child, per_key in zip(children[node], best_child):
                key = chosen & td.bags[child]
                if key not in per_key:
                    feasible = False
                    break
                gain, sub = per_key[key]
                total += gain
                picks.append(sub)
            if not feasible:
                continue
            total += sum(len(leaf_share(comp, chosen)) for comp in hanging[node])
            table[node][chosen] = (total, tuple(picks))

    result: set[int] = set()

    def collect(node: int, chosen: VertexSet) -> None:
        result.update(chosen)
        for comp in hanging[node]:
            result.update(leaf_share(comp, chosen))
        _, picks = table[node][chosen]
        for child, sub in zip(children[node], picks):
            collect(child, sub)

    for node in order:
        if parent[node] is None:
            root_best = max(table[node].items(), key=lambda kv: (kv[1][0], sorted(kv[0])))
            collect(node, root_best[0])
    for comp in free:
        result.update(_leaf_independent_set(g, h, comp))

    found = frozenset(result)
    if not is_independent(g, found):
        raise ContractViolation("dynamic program produced a dependent set")
    return found


@dataclass(frozen=True)
class BakerRun:
    epsilon: Fraction
    k: int
    strata: tuple[VertexSet, ...]
    sizes: tuple[int, ...]
    widths: tuple[int, ...]
    chosen: int
    result: VertexSet

    def to_json(self) -> dict[str, Any]:
        return {
            "epsilon": str(self.epsilon),
            "k": self.k,
            "strata": [sorted(s) for s in self.strata],
            "sizes": list(self.sizes),
            "widths": list(self.widths),
            "chosen": self.chosen,
            "result": sorted(self.result),
            "size": len(self.result),
        }


def _parse_epsilon(epsilon: Union[Fraction, str, int, float]) -> tuple[Fraction, int]:
    eps = Fraction(epsilon)
    if not 0 < eps < 1:
        raise PreconditionError(f"epsilon must lie strictly between 0 and 1, got {eps}")
    # smallest k with 2/k <= epsilon
    return eps, math.ceil(Fraction(2) / eps)


def _pick(
    eps: Fraction,
    k: int,
    strata: list[VertexSet],
    results: list[VertexSet],
    widths: list[int],
) -> BakerRun:
    chosen = max(range(len(results)), key=lambda i: (len(results[i]), -i))
    return BakerRun(
        epsilon=eps,
        k=k,
        strata=tuple(strata),
        sizes=tuple(len(r) for r in results),
        widths=tuple(widths),
        chosen=chosen,
        result=results[chosen],
    )


def baker_independent_set(
    g: Graph,
    h: HClass,
    x: Union[PlanarModulator, VertexSet],
    epsilon: Union[Fraction, str, int, float],
) -> BakerRun:
    """Independent set of size at least (1 - epsilon) * alpha(g).

    The torso of x is layered by BFS from the lowest vertex of each torso component;
    stratum i drops the layers congruent to i modulo k together with the leaf components
    touching them, and the rest is solved exactly over a few-layer decomposition.
    """
    eps, k = _parse_epsilon(epsilon)
    x_set = x.x if isinstance(x, PlanarModulator) else frozenset(x)
    report = verify_planar_modulator(g, h, x_set)
    if not report:
        raise PreconditionError(f"not a planar {h.name}-modulator: {report.reason}")
    assert report.modulator is not None and report.modulator.torso_embedding is not None

    labels = sorted(x_set)
    index = {v: i for i, v in enumerate(labels)}
    torso_graph = torso(g, labels)
    rotation = report.modulator.torso_embedding.relabel(index)
    roots = [min(comp) for comp in connected_components(torso_graph)]
    layer_of = bfs_layers(torso_graph, roots).layer_of() if roots else {}

    leaves = components_within(g, (v for v in g.vertices if v not in x_set))
    boundaries = {comp: neighborhood(g, comp) for comp in leaves}
    for comp, boundary in boundaries.items():
        seen = sorted({layer_of[index[v]] for v in boundary})
        if seen and seen[-1] - seen[0] > 1:
            raise ContractViolation(
                f"neighborhood of component {sorted(comp)} spans layers {seen}"
            )

    strata = [frozenset(labels[v] for v, d in layer_of.items() if d % k == i) for i in range(k)]
    results: list[VertexSet] = []
    widths: list[int] = []
    for i, stratum in enumerate(strata):
        kept_x = x_set - stratum
        kept_leaves = [c for c in leaves if boundaries[c] <= kept_x]
        keep = set(kept_x).union(*kept_leaves)
        part, part_labels = induced_subgraph(g, keep)
        part_index = {v: j for j, v in enumerate(part_labels)}

        layer_part, layer_labels = induced_subgraph(torso_graph, (index[v] for v in sorted(kept_x)))
        local = rotation.restrict(layer_labels).relabel(
            {old: new for new, old in enumerate(layer_labels)}
        )
        td = few_layer_tree_decomposition(layer_part, max(1, k - 1), local)
        base = TreeDecomposition(
            bags=tuple(
                frozenset(part_index[labels[layer_labels[v]]] for v in bag) for bag in td.bags
            ),
            tree_edges=td.tree_edges,
        )
        htd = HTreeDecomposition(
            base=base,
            x=frozenset(part_index[v] for v in kept_x),
            leaf_components=tuple(frozenset(part_index[v] for v in c) for c in kept_leaves),
        )
        check = h_tree_decomposition_verify(part, h, htd)
        if not check:
            raise ContractViolation(f"stratum {i} decomposition rejected: {check.reason}")
        found = treedec_is_dp(part, htd, h, verify=False)
        results.append(frozenset(part_labels[v] for v in found))
        widths.append(td.width)
        logger.debug(f"Stratum {i}: removed {len(stratum)}, width {td.width}, size {len(found)}")

    run = _pick(eps, k, strata, results, widths)
    logger.info(f"Baker independent set: size {len(run.result)} from stratum {run.chosen} (k={k})")
    return run


def baker_independent_set_ptw(
    g: Graph,
    h: HClass,
    pw: PlanarWidthDecomposition,
    width: int,
    epsilon: Union[Fraction, str, int, float],
    ceiling: Optional[int] = DEFAULT_PTD_CEILING,
) -> BakerRun:
    """Experimental variant over a planar-width decomposition of a modulator torso.

    Every planar bag torso is layered on its own; a vertex joins stratum i when one of its
    layers is congruent to i. The achieved widths are reported, not promised.
    """
    eps, k = _parse_epsilon(epsilon)
    if pw.x is None:
        raise PreconditionError("planar-width Baker needs a decomposition of a modulator torso")
    report = verify_planar_width(g, pw, width, h)
    if not report:
        raise PreconditionError(f"planar-width decomposition rejected: {report.reason}")

    torso_graph = Graph(g.n, torso_edges(g, pw.x))
    residues: dict[int, set[int]] = {}
    for node, tag in enumerate(pw.tags):
        if tag is not BagTag.PLANAR_TORSO:
            continue
        bag_labels = sorted(pw.base.bags[node])
        bag_index = {v: i for i, v in enumerate(bag_labels)}
        bag_graph = Graph(
            len(bag_labels),
            [(bag_index[u], bag_index[v]) for u, v in bag_torso_edges(torso_graph, pw.base, node)],
        )
        roots = [min(comp) for comp in connected_components(bag_graph)]
        if not roots:
            continue
        for v, d in bfs_layers(bag_graph, roots).layer_of().items():
            residues.setdefault(bag_labels[v], set()).add(d % k)

    leaves = list(pw.leaf_components)
    boundaries = {comp: neighborhood(g, comp) for comp in leaves}
    strata = [frozenset(v for v, res in residues.items() if i in res) for i in range(k)]
    results: list[VertexSet] = []
    widths: list[int] = []
    for stratum in strata:
        kept_x = pw.x - stratum
        kept_leaves = [c for c in leaves if boundaries[c] <= kept_x]
        part, part_labels = induced_subgraph(g, set(kept_x).union(*kept_leaves))
        part_index = {v: j for j, v in enumerate(part_labels)}
        local_x = frozenset(part_index[v] for v in kept_x)
        check_ceiling("baker_independent_set_ptw", len(local_x), ceiling)
        htd = h_tree_decomposition_from_modulator(part, local_x)
        found = treedec_is_dp(part, htd, h)
        results.append(frozenset(part_labels[v] for v in found))
        widths.append(htd.width)

    run = _pick(eps, k, strata, results, widths)
    logger.warning(f"Experimental planar-width Baker: size {len(run.result)}, widths {list(run.widths)}")
    return run
