"""Tree decompositions and their verifier."""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any, Optional

from .errors import InputError
from .graph import Graph, VertexSet


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags indexed by tree node; tree_edges join node indices."""

    bags: tuple[VertexSet, ...]
    tree_edges: tuple[tuple[int, int], ...] = ()

    @property
    def width(self) -> int:
        if not self.bags:
            return -1
        return max(len(bag) for bag in self.bags) - 1

    @property
    def node_count(self) -> int:
        return len(self.bags)

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.tree_edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def relabel(self, labels: Sequence[int]) -> "TreeDecomposition":
        """Map bag vertices through labels (new index -> old index)."""
        return TreeDecomposition(
            bags=tuple(frozenset(labels[v] for v in bag) for bag in self.bags),
            tree_edges=self.tree_edges,
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "nodes": list(range(len(self.bags))),
            "edges": [list(e) for e in self.tree_edges],
            "bags": [sorted(bag) for bag in self.bags],
            "width": self.width,
        }

    @classmethod
    def from_json(cls, raw: Any) -> "TreeDecomposition":
        """Inverse of to_json; "nodes" and "width" are ignored."""
        if not isinstance(raw, dict) or not isinstance(raw.get("bags"), list):
            raise InputError("tree decomposition JSON needs a 'bags' list")
        try:
            bags = tuple(frozenset(int(v) for v in bag) for bag in raw["bags"])
            edges = tuple((int(a), int(b)) for a, b in raw.get("edges", []))
        except (TypeError, ValueError) as e:
            raise InputError(f"malformed tree decomposition: {e}") from e
        return cls(bags=bags, tree_edges=edges)


@dataclass(frozen=True)
class VerificationReport:
    """Verifier outcome; falsy when the certificate is rejected."""

    ok: bool
    reason: str = ""
    details: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def is_tree(node_count: int, edges: Iterable[tuple[int, int]]) -> bool:
    edges = list(edges)
    if node_count == 0:
        return not edges
    if len(edges) != node_count - 1:
        return False
    parent = list(range(node_count))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        if not (0 <= a < node_count and 0 <= b < node_count):
            return False
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def verify_tree_decomposition(
    g: Graph,
    td: TreeDecomposition,
    vertices: Optional[Iterable[int]] = None,
) -> VerificationReport:
    """Check coverage, edge containment and subtree connectivity.

    `vertices` restricts the vertex set that must be covered (default: all of g).
    """
    required = frozenset(g.vertices if vertices is None else vertices)
    if not td.bags:
        if required:
            return VerificationReport(False, "decomposition has no bags")
        return VerificationReport(True)
    if not is_tree(len(td.bags), td.tree_edges):
        return VerificationReport(False, "tree edges do not form a tree")

    for i, bag in enumerate(td.bags):
        stray = [v for v in bag if not 0 <= v < g.n]
        if stray:
            return VerificationReport(False, f"bag {i} contains unknown vertex {stray[0]}")

    covered = frozenset().union(*td.bags)
    missing = sorted(required - covered)
    if missing:
        return VerificationReport(False, f"vertex {missing[0]} is in no bag", {"vertex": missing[0]})

    for u, v in g.edges:
        if u in required and v in required and not any(u in bag and v in bag for bag in td.bags):
            return VerificationReport(False, f"edge ({u}, {v}) is in no bag", {"edge": (u, v)})

    for v in covered:
        nodes = [i for i, bag in enumerate(td.bags) if v in bag]
        inside = sum(1 for a, b in td.tree_edges if v in td.bags[a] and v in td.bags[b])
        if inside != len(nodes) - 1:
            return VerificationReport(
                False, f"bags containing vertex {v} are not connected", {"vertex": v}
            )

    return VerificationReport(True, details={"width": td.width})


def chain(parts: Sequence[TreeDecomposition]) -> TreeDecomposition:
    """Join decompositions of disjoint graphs by linking their first nodes in sequence."""
    bags: list[VertexSet] = []
    edges: list[tuple[int, int]] = []
    previous_root: Optional[int] = None
    for part in parts:
        offset = len(bags)
        bags.extend(part.bags)
        edges.extend((a + offset, b + offset) for a, b in part.tree_edges)
        if part.bags:
            if previous_root is not None:
                edges.append((previous_root, offset))
            previous_root = offset
    if not bags:
        bags.append(frozenset())
    return TreeDecomposition(bags=tuple(bags), tree_edges=tuple(edges))
