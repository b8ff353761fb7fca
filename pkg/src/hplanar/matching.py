"""Exact weighted perfect-matching counts on H-planar graphs."""

import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Optional, Union

import networkx as nx

from .config import DEFAULT_PMM_CEILING
from .errors import ContractViolation, PreconditionError
from .exact import pmm_bruteforce
from .fkt import fkt_pmm
from .graph import (
    Edge,
    Graph,
    Separation,
    VertexSet,
    components_within,
    connected_components,
    induced_subgraph,
)
from .hclasses import HClass
from .matchgates import MatchgateGadget, Parity, Subset, feasible_subsets, synthesize_matchgate
from .modulator import PlanarModulator, verify_planar_modulator
from .planarity import is_planar, is_planar_graph

__all__ = [
    "CountingRun",
    "CountingStep",
    "combine_separation_pmm",
    "fkt_pmm",
    "hplanar_pmm",
    "pmm_bruteforce",
    "pmm_by_blocks",
    "run_hplanar_pmm",
]

logger = logging.getLogger(__name__)

SidePmm = Callable[[Graph], Fraction]


def _remove(g: Graph, gone: Iterable[int]) -> Graph:
    drop = set(gone)
    sub, _ = induced_subgraph(g, [v for v in g.vertices if v not in drop])
    return sub


def combine_separation_pmm(
    g: Graph,
    sep: Separation,
    side_pmm: Optional[SidePmm] = None,
) -> Fraction:
    """pmm(g) as the sum over gamma of pmm(g[A] - (S - gamma)) * pmm(g_B - gamma).

    S is the separator A & B, gamma the separator vertices matched on the A side, and
    g_B is g[B] without the edges inside S.
    """
    if sep.order not in (2, 3):
        raise PreconditionError(f"separation must have order 2 or 3, got {sep.order}")
    if not sep.is_valid(g):
        raise PreconditionError("pair is not a separation of the graph")
    count = side_pmm if side_pmm is not None else pmm_bruteforce
    boundary = sorted(sep.boundary)

    a_side, a_labels = induced_subgraph(g, sep.left)
    a_index = {v: i for i, v in enumerate(a_labels)}
    b_side, b_labels = induced_subgraph(g, sep.right)
    b_side = _without_edges_inside(b_side, b_labels, sep.boundary)
    b_index = {v: i for i, v in enumerate(b_labels)}

    total = Fraction(0)
    for size in range(len(boundary) + 1):
        for gamma in combinations(boundary, size):
            outside = [v for v in boundary if v not in gamma]
            left = count(_remove(a_side, (a_index[v] for v in outside)))
            if left == 0:
                continue
            total += left * count(_remove(b_side, (b_index[v] for v in gamma)))
    return total


def _without_edges_inside(g: Graph, labels: tuple[int, ...], inside: Iterable[int]) -> Graph:
    cut = set(inside)
    kept = [(u, v) for u, v in g.edges if not (labels[u] in cut and labels[v] in cut)]
    return Graph(g.n, kept, {(u, v): g.weight(u, v) for u, v in kept})


def pmm_by_blocks(
    g: Graph,
    h: Optional[HClass] = None,
    ceiling: Optional[int] = DEFAULT_PMM_CEILING,
) -> Fraction:
    """Count through components and cut vertices; blocks go to FKT, the class solver or brute force.

    At a cut vertex v exactly one piece of g - v may have odd order, and v is matched into it.
    """
    if g.n % 2:
        return Fraction(0)
    if g.n == 0:
        return Fraction(1)
    comps = connected_components(g)
    if len(comps) > 1:
        total = Fraction(1)
        for comp in comps:
            sub, _ = induced_subgraph(g, comp)
            total *= pmm_by_blocks(sub, h, ceiling)
            if total == 0:
                break
        return total
    if is_planar_graph(g):
        return fkt_pmm(g)
    member = h is not None and h.contains(g)
    if member and h is not None and h.pmm_solver is not None:
        return h.pmm_solver(g)
    cuts = sorted(nx.articulation_points(g.to_networkx()))
    if cuts:
        v = cuts[0]
        pieces = components_within(g, (u for u in g.vertices if u != v))
        odd = [p for p in pieces if len(p) % 2]
        if len(odd) != 1:
            return Fraction(0)
        total = Fraction(1)
        for piece in pieces:
            part = piece | {v} if piece == odd[0] else piece
            sub, _ = induced_subgraph(g, part)
            total *= pmm_by_blocks(sub, h, ceiling)
            if total == 0:
                break
        return total
    if member and h is not None:
        return h.pmm(g)
    return pmm_bruteforce(g, ceiling=ceiling)


@dataclass(frozen=True)
class CountingStep:
    """One entry of the substitution transcript.

    inside lists the modulator vertices the disk around the boundary swallowed together
    with the leaves.
    """

    kind: str
    boundary: tuple[int, ...]
    parity: Optional[str] = None
    counts: tuple[tuple[tuple[int, ...], Fraction], ...] = ()
    variant: str = ""
    scale: Fraction = Fraction(1)
    added: tuple[int, ...] = ()
    inside: tuple[int, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "boundary": list(self.boundary),
            "parity": self.parity,
            "counts": [{"gamma": list(gamma), "value": str(value)} for gamma, value in self.counts],
            "variant": self.variant,
            "scale": str(self.scale),
            "added": list(self.added),
            "inside": list(self.inside),
        }


@dataclass
class CountingRun:
    value: Fraction
    steps: list[CountingStep] = field(default_factory=list)
    final_planar: bool = True

    def to_json(self) -> dict[str, Any]:
        return {
            "value": str(self.value),
            "final_planar": self.final_planar,
            "steps": [s.to_json() for s in self.steps],
        }


@dataclass
class _Work:
    """Working graph over stable vertex ids; gadget vertices get fresh ids."""

    vertices: frozenset[int]
    weights: dict[Edge, Fraction]
    modulator: frozenset[int]

    def graph(self, subset: Optional[Iterable[int]] = None) -> tuple[Graph, tuple[int, ...]]:
        labels = tuple(sorted(self.vertices if subset is None else subset))
        index = {v: i for i, v in enumerate(labels)}
        edges: list[Edge] = []
        weights: dict[Edge, Fraction] = {}
        for (u, v), w in self.weights.items():
            if u in index and v in index:
                e = (index[u], index[v])
                edges.append(e)
                weights[e] = w
        return Graph(len(labels), edges, weights), labels

    def components(self, among: Iterable[int]) -> list[VertexSet]:
        graph, labels = self.graph(among)
        return [frozenset(labels[v] for v in comp) for comp in connected_components(graph)]

    def weight(self, u: int, v: int) -> Fraction:
        return self.weights[(min(u, v), max(u, v))]

    def neighbors(self, v: int) -> set[int]:
        out: set[int] = set()
        for a, b in self.weights:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out

    def boundary(self, comp: VertexSet) -> VertexSet:
        out: set[int] = set()
        for a, b in self.weights:
            if a in comp and b not in comp:
                out.add(b)
            elif b in comp and a not in comp:
                out.add(a)
        return frozenset(out)

    def restrict(self, keep: Iterable[int]) -> "_Work":
        kept = frozenset(keep)
        return _Work(
            vertices=kept,
            weights={e: w for e, w in self.weights.items() if e[0] in kept and e[1] in kept},
            modulator=self.modulator & kept,
        )

    def leaf_groups(self) -> dict[VertexSet, VertexSet]:
        """Union of the leaf components seeing each neighbourhood."""
        groups: dict[VertexSet, VertexSet] = {}
        for comp in self.components(self.vertices - self.modulator):
            key = self.boundary(comp)
            groups[key] = groups.get(key, frozenset()) | comp
        return groups


class _TorsoLayout:
    """Embedding of the torso of the working graph, with one face fixed as the outside.

    The disk of a triangular boundary is the side of the triangle away from that face.
    """

    def __init__(self, work: _Work, boundaries: Iterable[VertexSet]):
        labels = tuple(sorted(work.modulator))
        index = {v: i for i, v in enumerate(labels)}
        pairs = {(index[u], index[v]) for u, v in work.weights if u in index and v in index}
        triangles: set[VertexSet] = set()
        for boundary in boundaries:
            if len(boundary) == 3:
                triangles.add(boundary)
            for u, v in combinations(sorted(boundary), 2):
                pairs.add((index[u], index[v]))
        result = is_planar(Graph(len(labels), sorted(pairs)))
        if not result.planar or result.rotation is None:
            raise ContractViolation(f"torso of the working graph is not planar on {len(labels)} vertices")
        self.rotation = result.rotation.relabel(dict(enumerate(labels)))
        faces = [frozenset(face) for face in self.rotation.faces()]
        # prefer a face that is not itself a leaf triangle, then the widest one
        best = max(
            range(len(faces)),
            key=lambda i: (faces[i] not in triangles, len(faces[i]), -i),
            default=None,
        )
        self.outside: VertexSet = faces[best] if best is not None else frozenset()

    def disk(self, boundary: VertexSet) -> VertexSet:
        if len(boundary) != 3:
            return frozenset()
        a, b, c = sorted(boundary)
        sides = self.rotation.triangle_sides((a, b, c))
        outer = next((i for i, side in enumerate(sides) if side & self.outside), None)
        if outer is None:
            # the outside face is the triangle itself, bounding an empty side
            outer = 0 if not sides[0] else 1
        return sides[1 - outer]


class _HPlanarCounter:
    def __init__(self, h: HClass, next_id: int, instrument: bool, ceiling: Optional[int]):
        self.h = h
        self.next_id = next_id
        self.instrument = instrument
        self.ceiling = ceiling
        self.steps: list[CountingStep] = []
        self.final_planar = True

    def leaf_count(self, graph: Graph) -> Fraction:
        return pmm_by_blocks(graph, self.h, self.ceiling)

    def count(self, work: _Work) -> Fraction:
        if len(work.vertices) % 2:
            return Fraction(0)
        if not work.vertices:
            return Fraction(1)
        comps = work.components(work.vertices)
        if len(comps) > 1:
            total = Fraction(1)
            for comp in comps:
                total *= self.count(work.restrict(comp))
                if total == 0:
                    break
            return total

        groups = work.leaf_groups()
        if not groups:
            return self.finish(work)
        narrow = [s for s in groups if len(s) <= 1]
        if narrow:
            boundary = min(narrow, key=sorted)
            if not boundary:
                graph, _ = work.graph()
                return self.leaf_count(graph)
            return self.substitute(work, sorted(boundary), groups[boundary], frozenset())
        too_wide = [s for s in groups if len(s) > 4]
        if too_wide:
            raise ContractViolation(f"leaf component sees {len(too_wide[0])} modulator vertices")

        layout = _TorsoLayout(work, groups)
        wide = sorted((s for s in groups if len(s) == 4), key=sorted)
        if wide:
            leaf = min(work.components(groups[wide[0]]), key=sorted)
            return self.branch(work, layout, wide[0], leaf)
        # innermost disk first: a disk holding another boundary is strictly larger than it
        disks = {s: layout.disk(s) for s in groups}
        boundary = min(groups, key=lambda s: (len(disks[s]), sorted(s)))
        return self.substitute(work, sorted(boundary), groups[boundary], disks[boundary])

    def branch(self, work: _Work, layout: _TorsoLayout, boundary: VertexSet, comp: VertexSet) -> Fraction:
        """Split on the partner of the boundary vertex lying inside the other three's disk."""
        inner = [v for v in sorted(boundary) if v in layout.disk(boundary - {v})]
        variant = "inside"
        if len(inner) == 1:
            v = inner[0]
        else:
            variant = "presumption-violated"
            logger.warning(
                f"Boundary {sorted(boundary)} has {len(inner)} vertices inside the others' disk; "
                f"branching on the least attached one"
            )
            v = min(boundary, key=lambda b: (len(work.neighbors(b) & comp), b))
        into = sorted(work.neighbors(v) & comp)
        self.steps.append(
            CountingStep(kind="branch", boundary=tuple(sorted(boundary)), variant=variant, added=(v,))
        )
        detached = _Work(
            vertices=work.vertices,
            weights={e: w for e, w in work.weights.items() if not (v in e and (set(e) - {v}) & comp)},
            modulator=work.modulator,
        )
        total = self.count(detached)
        for u in into:
            total += work.weight(u, v) * self.count(work.restrict(work.vertices - {u, v}))
        return total

    def attach(self, work: _Work, leaf: VertexSet, attached: tuple[int, ...]) -> Fraction:
        """Guess the partner in the leaf of each attached boundary vertex, then count the leaf."""
        if not attached:
            graph, _ = work.graph(leaf)
            return self.leaf_count(graph)
        s, rest = attached[0], attached[1:]
        total = Fraction(0)
        for u in sorted(work.neighbors(s) & leaf):
            total += work.weight(s, u) * self.attach(work, leaf - {u}, rest)
        return total

    def piece_count(self, work: _Work, piece: VertexSet, attached: tuple[int, ...]) -> Fraction:
        if (len(piece) + len(attached)) % 2:
            return Fraction(0)
        if piece & work.modulator:
            # modulator vertices inside a disk form a planar piece
            graph, labels = work.graph(piece | frozenset(attached))
            return pmm_by_blocks(_without_edges_inside(graph, labels, attached), self.h, self.ceiling)
        return self.attach(work, piece, attached)

    def distribute(self, work: _Work, pieces: list[VertexSet], free: VertexSet) -> Fraction:
        """pmm of the disk side when exactly the free boundary vertices are matched into it."""
        states: dict[VertexSet, Fraction] = {frozenset(): Fraction(1)}
        memo: dict[tuple[VertexSet, tuple[int, ...]], Fraction] = {}
        for piece in pieces:
            seen = sorted(work.boundary(piece) & free)
            following: dict[VertexSet, Fraction] = {}
            for used, value in states.items():
                open_ = [v for v in seen if v not in used]
                for size in range(len(open_) + 1):
                    for delta in combinations(open_, size):
                        key = (piece, delta)
                        if key not in memo:
                            memo[key] = self.piece_count(work, piece, delta)
                        if memo[key] == 0:
                            continue
                        state = used | frozenset(delta)
                        following[state] = following.get(state, Fraction(0)) + value * memo[key]
            states = following
            if not states:
                return Fraction(0)
        return states.get(free, Fraction(0))

    def substitute(
        self, work: _Work, boundary: list[int], leaves: VertexSet, inside: VertexSet
    ) -> Fraction:
        inner = leaves | inside
        for u, v in work.weights:
            if (u in inner) != (v in inner) and (u if v in inner else v) not in boundary:
                raise ContractViolation(f"disk around {boundary} leaks through edge {u}-{v}")
        parity = Parity.of(len(inner) + len(boundary))
        pieces = sorted(work.components(inner), key=sorted)
        counts: dict[Subset, Fraction] = {}
        for gamma in feasible_subsets(len(boundary), parity):
            free = frozenset(boundary[i] for i in range(len(boundary)) if i not in gamma)
            counts[gamma] = self.distribute(work, pieces, free)
        rest = work.vertices - inner
        transcript = tuple(
            (tuple(boundary[i] for i in sorted(gamma)), value)
            for gamma, value in sorted(counts.items(), key=lambda kv: sorted(kv[0]))
        )

        if len(boundary) == 1:
            (gamma, value), = counts.items()
            step = CountingStep(
                kind="cut", boundary=tuple(boundary), parity=parity.value, counts=transcript, scale=value
            )
            self.steps.append(step)
            if value == 0:
                return Fraction(0)
            kept = rest if gamma else rest - {boundary[0]}
            return value * self.count(work.restrict(kept))

        try:
            gadget = synthesize_matchgate(len(boundary), parity, counts)
        except ContractViolation as e:
            logger.warning(f"No matchgate for boundary {boundary}: {e}; combining directly")
            return self.combine_directly(work, boundary, inner, counts, parity, transcript)
        replaced, added = self.glue(work.restrict(rest), boundary, gadget)
        self.steps.append(
            CountingStep(
                kind="gadget",
                boundary=tuple(boundary),
                parity=parity.value,
                counts=transcript,
                variant=gadget.variant,
                scale=gadget.scale,
                added=added,
                inside=tuple(sorted(inside)),
            )
        )
        if self.instrument:
            self.check_step(work, replaced, gadget.scale)
        if gadget.scale == 0:
            return Fraction(0)
        return gadget.scale * self.count(replaced)

    def combine_directly(
        self,
        work: _Work,
        boundary: list[int],
        inner: VertexSet,
        counts: dict[Subset, Fraction],
        parity: Parity,
        transcript: tuple[tuple[tuple[int, ...], Fraction], ...],
    ) -> Fraction:
        self.steps.append(
            CountingStep(kind="direct", boundary=tuple(boundary), parity=parity.value, counts=transcript)
        )
        rest = work.vertices - inner
        total = Fraction(0)
        for gamma, value in counts.items():
            if value == 0:
                continue
            outside = {boundary[i] for i in range(len(boundary)) if i not in gamma}
            total += value * self.count(work.restrict(rest - outside))
        return total

    def glue(
        self, work: _Work, boundary: list[int], gadget: MatchgateGadget
    ) -> tuple[_Work, tuple[int, ...]]:
        """Attach the gadget on the boundary; parallel edges merge by adding weights."""
        ids = {i: v for i, v in enumerate(boundary)}
        added = []
        for i in range(gadget.boundary_size, gadget.graph.n):
            ids[i] = self.next_id
            added.append(self.next_id)
            self.next_id += 1
        weights = dict(work.weights)
        for a, b in gadget.graph.edges:
            u, v = ids[a], ids[b]
            key = (min(u, v), max(u, v))
            weights[key] = weights.get(key, Fraction(0)) + gadget.graph.weight(a, b)
        glued = _Work(
            vertices=work.vertices | frozenset(added),
            weights=weights,
            modulator=work.modulator | frozenset(added),
        )
        return glued, tuple(added)

    def check_step(self, before: _Work, after: _Work, scale: Fraction) -> None:
        old, _ = before.graph()
        new, _ = after.graph()
        lhs = pmm_bruteforce(old, ceiling=None)
        rhs = scale * pmm_bruteforce(new, ceiling=None)
        if lhs != rhs:
            raise ContractViolation(f"gadget substitution changed the count: {lhs} != {rhs}")

    def finish(self, work: _Work) -> Fraction:
        graph, labels = work.graph()
        self.final_planar = is_planar_graph(graph)
        if not self.final_planar:
            raise ContractViolation(f"substituted graph on {graph.n} vertices is not planar")
        self.steps.append(CountingStep(kind="fkt", boundary=labels))
        return fkt_pmm(graph)


def run_hplanar_pmm(
    g: Graph,
    h: HClass,
    x: Union[PlanarModulator, Iterable[int]],
    instrument: bool = False,
    ceiling: Optional[int] = DEFAULT_PMM_CEILING,
) -> CountingRun:
    """Count perfect matchings of g given a planar h-modulator x.

    Leaf components are grouped by their neighborhood. A group seeing four modulator
    vertices is split on the partner of the one inside the others' disk. Otherwise the
    innermost disk of the torso embedding goes first: its leaves and the modulator vertices
    inside it are replaced by a matchgate drawn in the same disk, so the graph left at the
    end is planar and takes one Pfaffian per component.
    """
    x_set = x.x if isinstance(x, PlanarModulator) else frozenset(x)
    report = verify_planar_modulator(g, h, x_set)
    if not report:
        raise PreconditionError(f"not a planar {h.name}-modulator: {report.reason}")
    work = _Work(
        vertices=frozenset(g.vertices),
        weights={(u, v): g.weight(u, v) for u, v in g.edges},
        modulator=x_set,
    )
    counter = _HPlanarCounter(h, next_id=g.n, instrument=instrument, ceiling=ceiling)
    value = counter.count(work)
    logger.info(f"pmm over {h.name} modulator of size {len(x_set)}: {value} ({len(counter.steps)} steps)")
    return CountingRun(value=value, steps=counter.steps, final_planar=counter.final_planar)


def hplanar_pmm(
    g: Graph,
    h: HClass,
    x: Union[PlanarModulator, Iterable[int]],
    ceiling: Optional[int] = DEFAULT_PMM_CEILING,
) -> Fraction:
    return run_hplanar_pmm(g, h, x, ceiling=ceiling).value
