"""Reading and writing graphs and vertex lists.

Text format: a header line `n m`, then m lines `u v [p/q]`. Lines starting with `#` and
blank lines are ignored. JSON format: {"n": ..., "edges": [[u, v, "p/q"], ...]} with an
optional "rotation" object mapping a vertex to its clockwise neighbour list.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

from .errors import InputError
from .graph import Graph, VertexSet
from .planarity import RotationSystem


def _fraction(token: str, where: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{where}: {token!r} is not a rational weight") from None


def _int(token: str, where: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise InputError(f"{where}: {token!r} is not an integer") from None


def parse_graph_text(text: str) -> Graph:
    header: Optional[tuple[int, int]] = None
    edges: list[tuple[int, int]] = []
    weights: dict[tuple[int, int], Fraction] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {number}"
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise InputError(f"{where}: expected header 'n m', got {line!r}")
            header = (_int(parts[0], where), _int(parts[1], where))
            continue
        if len(parts) not in (2, 3):
            raise InputError(f"{where}: expected 'u v [weight]', got {line!r}")
        u, v = _int(parts[0], where), _int(parts[1], where)
        if not (0 <= u < header[0] and 0 <= v < header[0]):
            raise InputError(f"{where}: vertex out of range 0..{header[0] - 1}")
        edges.append((u, v))
        if len(parts) == 3:
            weights[(u, v)] = _fraction(parts[2], where)
    if header is None:
        raise InputError("missing header line 'n m'")
    if len(edges) != header[1]:
        raise InputError(f"header announces {header[1]} edges, found {len(edges)}")
    return Graph(header[0], edges, weights)


def format_graph_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    weights = g.explicit_weights
    for u, v in g.edges:
        w = weights.get((u, v))
        lines.append(f"{u} {v}" if w is None else f"{u} {v} {w}")
    return "\n".join(lines) + "\n"


def graph_to_json(g: Graph, rotation: Optional[RotationSystem] = None) -> dict[str, Any]:
    weights = g.explicit_weights
    payload: dict[str, Any] = {
        "n": g.n,
        "edges": [[u, v, str(weights[(u, v)])] if (u, v) in weights else [u, v] for u, v in g.edges],
    }
    if rotation is not None:
        payload["rotation"] = rotation.to_json()
    return payload


def graph_from_json(raw: Any) -> tuple[Graph, Optional[RotationSystem]]:
    if not isinstance(raw, dict) or "n" not in raw:
        raise InputError("graph JSON must be an object with an 'n' field")
    n = raw["n"]
    if not isinstance(n, int):
        raise InputError(f"'n' must be an integer, got {n!r}")
    edges: list[tuple[int, int]] = []
    weights: dict[tuple[int, int], Fraction] = {}
    for index, item in enumerate(raw.get("edges", [])):
        where = f"edge {index}"
        if not isinstance(item, list) or len(item) not in (2, 3):
            raise InputError(f"{where}: expected [u, v] or [u, v, weight], got {item!r}")
        u, v = item[0], item[1]
        if not isinstance(u, int) or not isinstance(v, int):
            raise InputError(f"{where}: endpoints must be integers")
        edges.append((u, v))
        if len(item) == 3:
            weights[(u, v)] = _fraction(str(item[2]), where)
    rotation = RotationSystem.from_json(raw["rotation"]) if raw.get("rotation") else None
    return Graph(n, edges, weights), rotation


def parse_graph(text: str) -> tuple[Graph, Optional[RotationSystem]]:
    """Detect the format from the first non-blank character."""
    if text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"invalid graph JSON at line {e.lineno}: {e.msg}") from None
        return graph_from_json(raw)
    return parse_graph_text(text), None


def read_graph(path: Union[str, Path]) -> tuple[Graph, Optional[RotationSystem]]:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read graph file {path}: {e.strerror}") from None
    return parse_graph(text)


def parse_vertex_list(raw: str, n: Optional[int] = None) -> VertexSet:
    """Parse `0,3,5` (commas or whitespace); `@path` reads the list from a file."""
    if raw.startswith("@"):
        try:
            raw = Path(raw[1:]).read_text()
        except OSError as e:
            raise InputError(f"cannot read vertex list {raw[1:]}: {e.strerror}") from None
    tokens = [t for t in raw.replace(",", " ").split() if t]
    vertices = set()
    for token in tokens:
        v = _int(token, "vertex list")
        if v < 0 or (n is not None and v >= n):
            raise InputError(f"vertex list: {v} is outside 0..{(n or 1) - 1}")
        vertices.add(v)
    return frozenset(vertices)


def format_vertex_list(vertices: VertexSet) -> str:
    return ",".join(str(v) for v in sorted(vertices))
