"""Perfect-matching counting on planar graphs through a Pfaffian orientation."""

import logging
from collections import deque
from fractions import Fraction
from math import isqrt
from typing import Optional

import sympy

from .errors import ContractViolation, PreconditionError
from .graph import Graph, connected_components, induced_subgraph
from .planarity import RotationSystem, is_planar

logger = logging.getLogger(__name__)


def pfaffian_orientation(g: Graph, rotation: RotationSystem) -> dict[tuple[int, int], int]:
    """Orientation of a connected plane graph with an odd number of forward darts on every inner face.

    Returns +1 for edges oriented u -> v (u < v) and -1 for v -> u.
    """
    faces = rotation.face_darts()
    if not faces:
        return {}
    outer = max(range(len(faces)), key=lambda i: (len(faces[i]), -i))

    parent: dict[int, Optional[int]] = {0: None}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for u in sorted(g.neighbors(v)):
            if u not in parent:
                parent[u] = v
                queue.append(u)

    orientation: dict[tuple[int, int], int] = {}
    for v, p in parent.items():
        if p is not None:
            orientation[(min(v, p), max(v, p))] = 1

    face_of: dict[tuple[int, int], int] = {}
    for i, face in enumerate(faces):
        for dart in face:
            face_of[dart] = i
    dual: list[list[tuple[int, tuple[int, int]]]] = [[] for _ in faces]
    for u, v in g.edges:
        if (u, v) not in orientation:
            a, b = face_of[(u, v)], face_of[(v, u)]
            dual[a].append((b, (u, v)))
            dual[b].append((a, (u, v)))

    # dual tree rooted at the outer face; every face is fixed through the edge to its parent
    order: list[int] = []
    via: dict[int, tuple[int, int]] = {}
    seen = {outer}
    queue = deque([outer])
    while queue:
        f = queue.popleft()
        order.append(f)
        for h, edge in dual[f]:
            if h not in seen:
                seen.add(h)
                via[h] = edge
                queue.append(h)
    if len(seen) != len(faces):
        raise ContractViolation("dual of the cotree does not reach every face")

    for f in reversed(order):
        if f == outer:
            continue
        u, v = via[f]
        forward = 0
        for a, b in faces[f]:
            key = (min(a, b), max(a, b))
            if key == (u, v):
                continue
            sign = orientation[key]
            if (sign == 1) == (a < b):
                forward += 1
        # the dart of (u, v) on this face must make the count odd
        dart = next((a, b) for a, b in faces[f] if (min(a, b), max(a, b)) == (u, v))
        agree = forward % 2 == 0
        along = 1 if dart[0] < dart[1] else -1
        orientation[(u, v)] = along if agree else -along
    return orientation


def _connected_pmm(g: Graph, rotation: RotationSystem) -> Fraction:
    if g.n == 0:
        return Fraction(1)
    if g.n % 2:
        return Fraction(0)
    orientation = pfaffian_orientation(g, rotation)
    matrix = sympy.zeros(g.n, g.n)
    for (u, v), sign in orientation.items():
        w = g.weight(u, v)
        entry = sympy.Rational(w.numerator, w.denominator) * sign
        matrix[u, v] = entry
        matrix[v, u] = -entry
    det = sympy.Rational(matrix.det(method="bareiss"))
    value = Fraction(int(det.p), int(det.q))
    if value < 0:
        raise ContractViolation(f"skew-symmetric determinant is negative: {value}")
    num, den = isqrt(value.numerator), isqrt(value.denominator)
    if num * num != value.numerator or den * den != value.denominator:
        raise ContractViolation(f"determinant {value} is not the square of a rational")
    return Fraction(num, den)


def fkt_pmm(g: Graph) -> Fraction:
    """Weighted number of perfect matchings of a planar graph."""
    if g.n % 2:
        return Fraction(0)
    result = is_planar(g)
    if not result:
        raise PreconditionError(f"fkt_pmm needs a planar graph, got {g!r}")
    total = Fraction(1)
    for comp in connected_components(g):
        if len(comp) % 2:
            return Fraction(0)
        sub, labels = induced_subgraph(g, comp)
        index = {old: new for new, old in enumerate(labels)}
        assert result.rotation is not None
        rotation = result.rotation.restrict(comp).relabel(index)
        total *= _connected_pmm(sub, rotation)
        if total == 0:
            break
    logger.debug(f"Pfaffian count for {g!r}: {total}")
    return total
