"""Planar H-modulators: verification, exhaustive search, big-leaf searches and self-reduction."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Optional

from .config import DEFAULT_MODULATOR_CEILING, DEFAULT_SUBSET_CEILING
from .decomposition import (
    EliminationSequence,
    planar_treedepth_exact,
    planar_treewidth_exact,
    treedepth_exact,
    treewidth_exact,
    verify_elimination_sequence,
)
from .errors import (
    ContractViolation,
    InputError,
    MissingSolverError,
    OracleFault,
    PreconditionError,
    check_ceiling,
)
from .graph import (
    Edge,
    Graph,
    VertexSet,
    bits,
    complete_graph,
    components_in_mask,
    from_mask,
    induced_subgraph,
    neighborhood_mask,
    to_mask,
    torso,
    torso_edges,
)
from .hclasses import HClass, min_forbidden_subgraph
from .planarity import KuratowskiWitness, RotationSystem, is_planar, is_planar_graph, planar_edges
from .separations import enumerate_separations
from .splitters import splitter_family

logger = logging.getLogger(__name__)

# torso of a planar modulator is K5-free, so no component sees more than this many modulator vertices
MAX_ATTACHMENT = 4


@dataclass(frozen=True)
class ComponentCertificate:
    component: VertexSet
    neighborhood: VertexSet
    member: bool


@dataclass(frozen=True)
class PlanarModulator:
    x: VertexSet
    torso_embedding: Optional[RotationSystem]
    component_certificates: tuple[ComponentCertificate, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "x": sorted(self.x),
            "torso_rotation": None if self.torso_embedding is None else self.torso_embedding.to_json(),
            "components": [
                {
                    "vertices": sorted(c.component),
                    "neighborhood": sorted(c.neighborhood),
                    "member": c.member,
                }
                for c in self.component_certificates
            ],
        }


@dataclass(frozen=True)
class ModulatorReport:
    """Verdict of verify_planar_modulator with the first failure, if any."""

    ok: bool
    reason: str = ""
    witness: Optional[KuratowskiWitness] = None
    failing_component: Optional[VertexSet] = None
    modulator: Optional[PlanarModulator] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_planar_modulator(g: Graph, h: HClass, x: VertexSet) -> ModulatorReport:
    """Accept x iff torso(g, x) is planar and every component of g - x lies in h."""
    x = frozenset(x)
    stray = sorted(v for v in x if not 0 <= v < g.n)
    if stray:
        return ModulatorReport(False, f"vertex {stray[0]} is not in the graph")

    x_mask = to_mask(x)
    certificates = []
    for comp in components_in_mask(g, g.full_mask & ~x_mask):
        sub, _ = induced_subgraph(g, bits(comp))
        member = h.contains(sub)
        component = from_mask(comp)
        if not member:
            return ModulatorReport(
                False,
                f"component {sorted(component)} is not in {h.name}",
                failing_component=component,
            )
        certificates.append(
            ComponentCertificate(
                component=component,
                neighborhood=from_mask(neighborhood_mask(g, comp)),
                member=True,
            )
        )

    labels = sorted(x)
    result = is_planar(torso(g, labels))
    if not result:
        assert result.witness is not None
        witness = KuratowskiWitness(
            kind=result.witness.kind,
            edges=tuple(sorted((labels[u], labels[v]) for u, v in result.witness.edges)),
            branch_vertices=tuple(labels[v] for v in result.witness.branch_vertices),
        )
        return ModulatorReport(False, f"torso is not planar ({witness.kind})", witness=witness)

    for cert in certificates:
        if len(cert.neighborhood) > MAX_ATTACHMENT:
            raise ContractViolation(
                f"component {sorted(cert.component)} attaches to {len(cert.neighborhood)} "
                "vertices of a planar torso"
            )
    assert result.rotation is not None
    rotation = result.rotation.relabel(dict(enumerate(labels)))
    modulator = PlanarModulator(x=x, torso_embedding=rotation, component_certificates=tuple(certificates))
    return ModulatorReport(True, modulator=modulator)


class _ModulatorSearch:
    """Branching over vertex assignments (modulator or leaf) with sound pruning.

    Leaf components that already fail h (heredity), grow beyond the class order,
    or attach to more than four modulator vertices are cut, as is any partial
    torso that is already non-planar.
    """

    def __init__(self, g: Graph, h: HClass, first_only: bool):
        self.g = g
        self.h = h
        self.first_only = first_only
        self.masks = g.masks
        self.singleton_member = h.contains(Graph(1))
        self.member_cache: dict[int, bool] = {}
        self.best_key: Optional[tuple[int, tuple[int, ...]]] = None
        self.nodes = 0

    def member(self, comp: int) -> bool:
        if comp not in self.member_cache:
            sub, _ = induced_subgraph(self.g, bits(comp))
            self.member_cache[comp] = self.h.contains(sub)
        return self.member_cache[comp]

    def component(self, start: int, r_mask: int) -> int:
        comp = 1 << start
        frontier = comp
        while frontier:
            grown = 0
            for v in bits(frontier):
                grown |= self.masks[v]
            grown &= r_mask & ~comp
            comp |= grown
            frontier = grown
        return comp

    def component_ok(self, comp: int, x_mask: int, unassigned: int) -> bool:
        h = self.h
        if h.max_order is not None and comp.bit_count() > h.max_order:
            return False
        around = neighborhood_mask(self.g, comp)
        if (around & x_mask).bit_count() > MAX_ATTACHMENT:
            return False
        if h.hereditary or not around & unassigned:
            return self.member(comp)
        return True

    def torso_planar(self, x_mask: int, r_mask: int) -> bool:
        size = x_mask.bit_count()
        if size < 5:
            return True
        edges: set[Edge] = {
            (u, v) for u, v in self.g.edges if (x_mask >> u) & 1 and (x_mask >> v) & 1
        }
        for comp in components_in_mask(self.g, r_mask):
            boundary = sorted(bits(neighborhood_mask(self.g, comp) & x_mask))
            edges.update(combinations(boundary, 2))
        return planar_edges(size, edges)

    def pick(self, unassigned: int) -> int:
        assigned = self.g.full_mask & ~unassigned
        best, best_key = -1, None
        for v in bits(unassigned):
            key = ((self.masks[v] & assigned).bit_count(), -self.g.degree(v), -v)
            if best_key is None or key > best_key:
                best, best_key = v, key
        return best

    def run(self) -> Optional[int]:
        self.best_mask: Optional[int] = None
        self.search(0, 0)
        return self.best_mask

    def search(self, x_mask: int, r_mask: int) -> bool:
        self.nodes += 1
        unassigned = self.g.full_mask & ~x_mask & ~r_mask
        if not unassigned:
            return self.record(x_mask, r_mask)
        v = self.pick(unassigned)
        bit = 1 << v
        rest = unassigned & ~bit

        # a vertex of degree <= 3 seeing only modulator vertices stays a leaf:
        # trading its star for a triangle on its neighbours keeps the torso planar
        only_leaf = (
            self.singleton_member
            and self.g.degree(v) <= 3
            and not self.masks[v] & ~x_mask
        )
        new_r = r_mask | bit
        comp = self.component(v, new_r)
        if self.component_ok(comp, x_mask, rest) and self.torso_planar(x_mask, new_r):
            if self.search(x_mask, new_r):
                return True
        if only_leaf:
            return False
        # modulator branch
        new_x = x_mask | bit
        if self.best_key is not None and new_x.bit_count() > self.best_key[0]:
            return False
        touched = set()
        for u in bits(self.masks[v] & r_mask):
            touched.add(self.component(u, r_mask))
        if all(self.component_ok(c, new_x, rest) for c in touched) and self.torso_planar(new_x, r_mask):
            if self.search(new_x, r_mask):
                return True
        return False

    def record(self, x_mask: int, r_mask: int) -> bool:
        for comp in components_in_mask(self.g, r_mask):
            if not self.member(comp):
                return False
            if (neighborhood_mask(self.g, comp) & x_mask).bit_count() > MAX_ATTACHMENT:
                return False
        edges = torso_edges(self.g, bits(x_mask))
        if not planar_edges(x_mask.bit_count(), edges):
            return False
        key = (x_mask.bit_count(), tuple(bits(x_mask)))
        if self.best_key is None or key < self.best_key:
            self.best_key = key
            self.best_mask = x_mask
        return self.first_only


def brute_force_planar_modulator(
    g: Graph,
    h: HClass,
    ceiling: Optional[int] = DEFAULT_MODULATOR_CEILING,
    first_only: bool = False,
) -> Optional[PlanarModulator]:
    """Minimum planar h-modulator (ties: lexicographically least sorted vertex list), or None.

    With first_only the first modulator met is returned instead of the minimum.
    """
    check_ceiling("brute_force_planar_modulator", g.n, ceiling)
    if h.universal:
        return verify_planar_modulator(g, h, frozenset()).modulator
    search = _ModulatorSearch(g, h, first_only=first_only)
    found = search.run()
    logger.debug(f"Modulator search on {g!r} for {h.name}: {search.nodes} nodes")
    if found is None:
        return None
    report = verify_planar_modulator(g, h, from_mask(found))
    if not report:
        raise ContractViolation(f"search produced a rejected modulator: {report.reason}")
    return report.modulator


def has_planar_modulator(
    g: Graph, h: HClass, ceiling: Optional[int] = DEFAULT_MODULATOR_CEILING
) -> bool:
    """Decision version; planar graphs and graphs whose components all lie in h answer at once."""
    if h.universal or is_planar_graph(g):
        return True
    if verify_planar_modulator(g, h, frozenset()):
        return True
    return brute_force_planar_modulator(g, h, ceiling=ceiling, first_only=True) is not None


def big_leaf_search(
    g: Graph,
    h: HClass,
    a: int,
    ceiling: Optional[int] = DEFAULT_SUBSET_CEILING,
) -> Optional[PlanarModulator]:
    """A planar h-modulator S with a component of g - S of size >= a, on (a, 4)-unbreakable input.

    Tries every separation (A, B) of order <= 4 with g[A - B] connected and |B - A| < a,
    then every S with A & B <= S <= B.
    """
    if a > g.n:
        return None
    for sep in enumerate_separations(g, MAX_ATTACHMENT, a, ceiling=ceiling, include_trivial=True):
        big = sep.left - sep.right
        if len(big) < a:
            continue
        boundary = sorted(sep.boundary)
        free = sorted(sep.right - sep.left)
        for size in range(len(free) + 1):
            for extra in combinations(free, size):
                s = frozenset(boundary) | frozenset(extra)
                report = verify_planar_modulator(g, h, s)
                if report:
                    logger.debug(f"Big leaf of size {len(big)} behind separator {boundary}")
                    return report.modulator
    return None


class TargetKind(Enum):
    PTW = "ptw"
    PTD = "ptd"
    TW = "tw"
    TD = "td"
    SIZE = "size"


@dataclass(frozen=True)
class TargetClass:
    """The torso class G_k of a G_k-by-H modulator."""

    kind: TargetKind
    k: int

    @classmethod
    def parse(cls, raw: str) -> "TargetClass":
        try:
            kind, value = raw.split(":", 1)
            return cls(TargetKind(kind.strip().lower()), int(value))
        except ValueError as e:
            raise InputError(f"target must look like ptd:2, got {raw!r}") from e

    @property
    def attachment_bound(self) -> int:
        """Most modulator vertices one leaf component can see."""
        if self.kind is TargetKind.PTW:
            return max(MAX_ATTACHMENT, self.k + 1)
        if self.kind is TargetKind.PTD:
            return MAX_ATTACHMENT * self.k
        if self.kind is TargetKind.TW:
            return self.k + 1
        return self.k

    def contains(self, t: Graph) -> bool:
        if self.kind is TargetKind.SIZE:
            return t.n <= self.k
        if self.kind is TargetKind.TD:
            return treedepth_exact(t)[0] <= self.k
        if self.kind is TargetKind.TW:
            return treewidth_exact(t).width <= self.k
        if self.kind is TargetKind.PTD:
            return planar_treedepth_exact(t, None, k_max=self.k).value is not None
        return planar_treewidth_exact(t)[0] <= self.k

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.k}"


@dataclass(frozen=True)
class GHModulator:
    x: VertexSet
    target: TargetClass
    leaf_components: tuple[VertexSet, ...] = field(default_factory=tuple)

    def to_json(self) -> dict[str, Any]:
        return {
            "x": sorted(self.x),
            "target": str(self.target),
            "leaf_components": [sorted(c) for c in self.leaf_components],
        }


def is_gh_modulator(
    g: Graph, h: HClass, target: TargetClass, x: VertexSet, big_leaf: Optional[int] = None
) -> bool:
    """torso(g, x) in the target class, all components of g - x in h, and optionally a big leaf."""
    x_mask = to_mask(x)
    comps = components_in_mask(g, g.full_mask & ~x_mask)
    if big_leaf is not None and not any(c.bit_count() >= big_leaf for c in comps):
        return False
    for comp in comps:
        sub, _ = induced_subgraph(g, bits(comp))
        if not h.contains(sub):
            return False
    return target.contains(torso(g, sorted(x)))


def _gh_result(g: Graph, x: VertexSet, target: TargetClass) -> GHModulator:
    leaves = tuple(from_mask(c) for c in components_in_mask(g, g.full_mask & ~to_mask(x)))
    return GHModulator(x=frozenset(x), target=target, leaf_components=leaves)


def brute_force_gh_modulator(
    g: Graph,
    h: HClass,
    target: TargetClass,
    big_leaf: Optional[int] = None,
    ceiling: Optional[int] = DEFAULT_SUBSET_CEILING,
) -> Optional[GHModulator]:
    """Smallest modulator by exhaustive enumeration, in size-then-lexicographic order."""
    check_ceiling("brute_force_gh_modulator", g.n, ceiling)
    for size in range(g.n + 1):
        for chosen in combinations(range(g.n), size):
            if is_gh_modulator(g, h, target, frozenset(chosen), big_leaf):
                return _gh_result(g, frozenset(chosen), target)
    return None


def big_leaf_GH_search(  # noqa: N802
    g: Graph,
    h: HClass,
    target: TargetClass,
    a: int,
    seed: int = 0,
    ceiling: Optional[int] = DEFAULT_SUBSET_CEILING,
) -> Optional[GHModulator]:
    """Big-leaf G_k-by-H modulator on (a, k')-unbreakable input, k' the attachment bound.

    For each U of an (k', a-1)-splitter family: Z_U collects the components of g - U
    outside h, A_U = N(Z_U), C_U is the big component of g - A_U, S_U a minimum
    h-deletion set inside C_U, and every Y outside N[C_U] is tried.
    """
    check_ceiling("big_leaf_GH_search", g.n, ceiling)
    if not h.union_closed:
        raise PreconditionError(f"big-leaf search needs a union-closed class, {h.name} is not")
    if a < 1:
        raise PreconditionError(f"big-leaf threshold must be positive, got {a}")
    if a > g.n:
        return None
    k_prime = target.attachment_bound
    family = splitter_family(g.n, k_prime, a - 1, seed=seed)
    full = g.full_mask
    tried: set[int] = set()

    for u_set in family:
        u_mask = to_mask(u_set)
        z_mask = 0
        for comp in components_in_mask(g, full & ~u_mask):
            sub, _ = induced_subgraph(g, bits(comp))
            if not h.contains(sub):
                z_mask |= comp
        a_mask = neighborhood_mask(g, z_mask)
        if a_mask.bit_count() > k_prime:
            continue
        for big in components_in_mask(g, full & ~a_mask):
            if big.bit_count() < a:
                continue
            sub, labels = induced_subgraph(g, bits(big))
            try:
                local = h.min_deletion(sub, k_prime - a_mask.bit_count())
            except NotImplementedError as e:
                raise MissingSolverError(f"{h.name} has no deletion solver") from e
            if local is None:
                continue
            s_mask = to_mask(labels[v] for v in local)
            outside = list(bits(full & ~big & ~neighborhood_mask(g, big) & ~a_mask))
            check_ceiling("big_leaf_GH_search outside part", len(outside), ceiling)
            for size in range(len(outside) + 1):
                for y in combinations(outside, size):
                    x_mask = to_mask(y) | a_mask | s_mask
                    if x_mask in tried:
                        continue
                    tried.add(x_mask)
                    x = from_mask(x_mask)
                    if is_gh_modulator(g, h, target, x, big_leaf=a):
                        logger.debug(f"Big-leaf {target} modulator {sorted(x)} from splitter set")
                        return _gh_result(g, x, target)
    return None


# --- self-reduction ------------------------------------------------------------

Decider = Callable[[Graph], bool]

PADDING_COPIES = 5


@dataclass
class _PaddedGraph:
    """Working graph for self-reduction: vertex ids of the input are kept."""

    n: int
    edges: set[Edge]

    def graph(self) -> Graph:
        return Graph(self.n, sorted(self.edges))

    def attach(self, gadget: Graph, root: int, at: int) -> None:
        """Glue gadget's root onto vertex `at`; the other gadget vertices are appended."""
        index: dict[int, int] = {}
        for w in gadget.vertices:
            if w == root:
                index[w] = at
            else:
                index[w] = self.n
                self.n += 1
        for u, v in gadget.edges:
            a, b = index[u], index[v]
            self.edges.add((min(a, b), max(a, b)))


def padding_gadget(forbidden: Graph, copies: int = PADDING_COPIES) -> tuple[Graph, int]:
    """Copies of the forbidden graph forced through one root vertex.

    Connected: the copies share their vertex 0. Disconnected: a new root joins every copy vertex.
    """
    size = forbidden.n
    edges: list[Edge] = []
    if _is_connected(forbidden):
        # vertex 0 is the shared root
        n = 1 + copies * (size - 1)
        for c in range(copies):
            def at(w: int, c: int = c) -> int:
                return 0 if w == 0 else 1 + c * (size - 1) + (w - 1)

            edges.extend((at(u), at(v)) for u, v in forbidden.edges)
        return Graph(n, edges), 0
    root = copies * size
    for c in range(copies):
        edges.extend((c * size + u, c * size + v) for u, v in forbidden.edges)
        edges.extend((c * size + w, root) for w in range(size))
    return Graph(copies * size + 1, edges), root


def _is_connected(g: Graph) -> bool:
    return g.n > 0 and len(components_in_mask(g, g.full_mask)) == 1


def self_reduce_modulator(
    g: Graph,
    h: HClass,
    decide: Optional[Decider] = None,
) -> PlanarModulator:
    """Build a planar h-modulator from a decision oracle by padding one vertex at a time."""
    if not h.hereditary:
        raise PreconditionError(f"self-reduction needs a hereditary class, {h.name} is not")
    if h.universal:
        return verify_planar_modulator(g, h, frozenset()).modulator  # type: ignore[return-value]
    oracle = decide if decide is not None else (lambda graph: has_planar_modulator(graph, h, ceiling=None))
    if not oracle(g):
        raise PreconditionError(f"{g!r} has no planar {h.name}-modulator")
    forbidden = min_forbidden_subgraph(h)
    if forbidden is None:
        return verify_planar_modulator(g, h, frozenset()).modulator  # type: ignore[return-value]
    gadget, root = padding_gadget(forbidden)

    working = _PaddedGraph(n=g.n, edges=set(g.edges))
    chosen: list[int] = []
    for v in g.vertices:
        trial = _PaddedGraph(n=working.n, edges=set(working.edges))
        trial.attach(gadget, root, v)
        if oracle(trial.graph()):
            working = trial
            chosen.append(v)
    logger.info(
        f"Self-reduction kept {len(chosen)} of {g.n} vertices; "
        f"padded graph has {working.n} vertices"
    )
    report = verify_planar_modulator(g, h, frozenset(chosen))
    if not report:
        raise OracleFault(f"padded vertices {chosen} do not form a modulator: {report.reason}")
    assert report.modulator is not None
    return report.modulator


def elimination_gadget(forbidden: Graph, k: int) -> tuple[Graph, int]:
    """K_{4k} with a padding gadget on every clique vertex; clique vertex 0 is the root."""
    clique = complete_graph(4 * k)
    padded = _PaddedGraph(n=clique.n, edges=set(clique.edges))
    gadget, root = padding_gadget(forbidden)
    for v in range(clique.n):
        padded.attach(gadget, root, v)
    return padded.graph(), 0


LevelDecider = Callable[[Graph, int], bool]


def self_reduce_elimination_sequence(
    g: Graph,
    h: HClass,
    k: int,
    decide: Optional[LevelDecider] = None,
) -> EliminationSequence:
    """Certifying elimination sequence of depth <= k, one level at a time by padding."""
    if not h.hereditary:
        raise PreconditionError(f"self-reduction needs a hereditary class, {h.name} is not")
    oracle = decide if decide is not None else (
        lambda graph, depth: planar_treedepth_exact(graph, h, k_max=depth, ceiling=None).value
        is not None
    )
    if h.universal:
        return EliminationSequence(layers=())
    if not oracle(g, k):
        raise PreconditionError(f"{g!r} has {h.name}-planar treedepth above {k}")
    forbidden = min_forbidden_subgraph(h)
    assert forbidden is not None

    layers: list[VertexSet] = []
    remaining = list(g.vertices)
    for level in range(k, 0, -1):
        current, labels = induced_subgraph(g, remaining)
        if verify_elimination_sequence(current, h, EliminationSequence(layers=())):
            break
        gadget, root = elimination_gadget(forbidden, level)
        working = _PaddedGraph(n=current.n, edges=set(current.edges))
        chosen: list[int] = []
        for v in current.vertices:
            trial = _PaddedGraph(n=working.n, edges=set(working.edges))
            trial.attach(gadget, root, v)
            if oracle(trial.graph(), level):
                working = trial
                chosen.append(v)
        layer = frozenset(labels[v] for v in chosen)
        layers.append(layer)
        remaining = [v for v in remaining if v not in layer]

    seq = EliminationSequence(layers=tuple(layers))
    report = verify_elimination_sequence(g, h, seq)
    if not report:
        raise OracleFault(f"self-reduced elimination sequence is invalid: {report.reason}")
    return seq
