"""Planar SAT to {K4}-planarity: instance generator and equivalence harness.

Every variable gets a 5-clique R_i = {x_i, not x_i, y_i^1..3}; every clause gets a clique
on its three clause vertices and its pads Z_j (a 6-clique for three literals, a 5-clique
for two). A literal is joined to its own clause vertex, so no clause vertex sees two
variable vertices, and w_j of a two-literal clause sees none.
"""

import logging
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, product
from typing import Any, Optional

from .config import DEFAULT_HARNESS_CEILING, DEFAULT_SAT_CEILING
from .errors import CeilingExceeded, ContractViolation, InputError, PreconditionError, check_ceiling
from .graph import Edge, Graph, VertexSet, components_within
from .hclasses import builtin
from .modulator import brute_force_planar_modulator, verify_planar_modulator
from .planarity import planar_edges

logger = logging.getLogger(__name__)

Assignment = tuple[bool, ...]


@dataclass(frozen=True)
class PlanarCnf:
    """CNF over variables 1..variables with DIMACS-style literals (-v is the negation of v)."""

    variables: int
    clauses: tuple[tuple[int, ...], ...]

    def incidence_edges(self) -> list[Edge]:
        """Edges of the incidence graph: literal pairs 2i, 2i+1 and clause vertices after them."""
        edges = [(2 * i, 2 * i + 1) for i in range(self.variables)]
        for j, clause in enumerate(self.clauses):
            for lit in clause:
                edges.append((_literal_vertex(lit), 2 * self.variables + j))
        return edges

    def validate(self) -> None:
        """Raise InputError unless the restricted planar SAT conditions hold."""
        if self.variables < 0:
            raise InputError(f"variable count must be non-negative, got {self.variables}")
        positive = [0] * self.variables
        negative = [0] * self.variables
        for j, clause in enumerate(self.clauses, start=1):
            if len(clause) not in (2, 3):
                raise InputError(f"clause {j} has {len(clause)} literals; 2 or 3 are allowed")
            if len(set(clause)) != len(clause):
                raise InputError(f"clause {j} repeats a literal")
            for lit in clause:
                var = abs(lit)
                if lit == 0 or var > self.variables:
                    raise InputError(f"clause {j} has literal {lit} outside 1..{self.variables}")
                if lit > 0:
                    positive[var - 1] += 1
                else:
                    negative[var - 1] += 1
        for i in range(self.variables):
            if positive[i] > 2 or negative[i] > 2:
                raise InputError(
                    f"variable {i + 1} occurs {positive[i]} times positively and "
                    f"{negative[i]} times negated; at most 2 each are allowed"
                )
        if not planar_edges(2 * self.variables + len(self.clauses), self.incidence_edges()):
            raise InputError("incidence graph of the formula is not planar")

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(any(assignment[abs(lit) - 1] == (lit > 0) for lit in clause) for clause in self.clauses)


def _literal_vertex(lit: int) -> int:
    return 2 * (abs(lit) - 1) + (0 if lit > 0 else 1)


@dataclass(frozen=True)
class ReductionOutput:
    graph: Graph
    variable_vertices: tuple[tuple[int, int], ...]
    variable_pads: tuple[tuple[int, int, int], ...]
    clause_vertices: tuple[tuple[int, int, int], ...]
    clause_pads: tuple[tuple[int, ...], ...]
    # (clause index, literal) -> the clause vertex joined to that literal's variable vertex
    anchors: dict[tuple[int, int], int] = field(default_factory=dict)

    def variable_clique(self, i: int) -> VertexSet:
        return frozenset(self.variable_vertices[i]) | frozenset(self.variable_pads[i])

    def clause_clique(self, j: int) -> VertexSet:
        return frozenset(self.clause_vertices[j]) | frozenset(self.clause_pads[j])

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.graph.n,
            "m": self.graph.m,
            "variables": [list(pair) for pair in self.variable_vertices],
            "variable_pads": [list(p) for p in self.variable_pads],
            "clauses": [list(c) for c in self.clause_vertices],
            "clause_pads": [list(p) for p in self.clause_pads],
        }


def reduce(phi: PlanarCnf) -> ReductionOutput:
    """Build G'' for phi; numbering is deterministic in the order of variables and clauses."""
    phi.validate()
    n, m = phi.variables, len(phi.clauses)
    edges: list[Edge] = []
    variable_vertices = tuple((2 * i, 2 * i + 1) for i in range(n))
    variable_pads = tuple((2 * n + 3 * i, 2 * n + 3 * i + 1, 2 * n + 3 * i + 2) for i in range(n))
    for (pos, neg), pads in zip(variable_vertices, variable_pads):
        edges.append((pos, neg))
        edges.extend(combinations(pads, 2))
        edges.extend((p, lit) for p in pads for lit in (pos, neg))

    base = 5 * n
    clause_vertices = tuple((base + 3 * j, base + 3 * j + 1, base + 3 * j + 2) for j in range(m))
    next_id = base + 3 * m
    clause_pads: list[tuple[int, ...]] = []
    anchors: dict[tuple[int, int], int] = {}
    for j, (clause, trio) in enumerate(zip(phi.clauses, clause_vertices)):
        edges.extend(combinations(trio, 2))
        pads = tuple(range(next_id, next_id + len(clause)))
        next_id += len(clause)
        clause_pads.append(pads)
        edges.extend(combinations(pads, 2))
        edges.extend((p, c) for p in pads for c in trio)
        for slot, lit in enumerate(clause):
            anchors[(j, lit)] = trio[slot]
            edges.append((_literal_vertex(lit), trio[slot]))

    graph = Graph(next_id, edges)
    logger.debug(f"Reduction of {n} variables and {m} clauses: {graph!r}")
    return ReductionOutput(
        graph=graph,
        variable_vertices=variable_vertices,
        variable_pads=variable_pads,
        clause_vertices=clause_vertices,
        clause_pads=tuple(clause_pads),
        anchors=anchors,
    )


@dataclass(frozen=True)
class ReductionCheck:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_reduction(reduction: ReductionOutput, phi: PlanarCnf) -> ReductionCheck:
    """Compare a reduction against the construction counts and the canonical G''."""
    n, m = phi.variables, len(phi.clauses)
    want_vertices = 5 * n + 3 * m + sum(len(c) for c in phi.clauses)
    if reduction.graph.n != want_vertices:
        return ReductionCheck(False, f"expected {want_vertices} vertices, found {reduction.graph.n}")
    want_edges = (
        10 * n
        + sum(3 + len(c) * (len(c) - 1) // 2 + 3 * len(c) + len(c) for c in phi.clauses)
    )
    if reduction.graph.m != want_edges:
        return ReductionCheck(False, f"expected {want_edges} edges, found {reduction.graph.m}")
    for j, clause in enumerate(phi.clauses):
        if len(clause) == 2:
            w = reduction.clause_vertices[j][2]
            if any(u < 2 * n for u in reduction.graph.neighbors(w)):
                return ReductionCheck(False, f"w of clause {j + 1} touches a variable vertex")
    if reduction.graph != reduce(phi).graph:
        return ReductionCheck(False, "graph differs from the construction")
    return ReductionCheck(True)


def find_assignment(phi: PlanarCnf, ceiling: Optional[int] = DEFAULT_SAT_CEILING) -> Optional[Assignment]:
    """First satisfying assignment in lexicographic order (False before True)."""
    check_ceiling("sat_bruteforce", phi.variables, ceiling)
    for values in product((False, True), repeat=phi.variables):
        if phi.satisfied_by(values):
            return values
    return None


def sat_bruteforce(phi: PlanarCnf, ceiling: Optional[int] = DEFAULT_SAT_CEILING) -> bool:
    return find_assignment(phi, ceiling) is not None


def forward_modulator(reduction: ReductionOutput, phi: PlanarCnf, assignment: Sequence[bool]) -> VertexSet:
    """Complement of the K4s picked by a satisfying assignment."""
    if not phi.satisfied_by(assignment):
        raise PreconditionError("assignment does not satisfy the formula")
    kept: set[int] = set()
    for i, (pos, neg) in enumerate(reduction.variable_vertices):
        kept.update(reduction.variable_pads[i])
        kept.add(neg if assignment[i] else pos)
    for j, clause in enumerate(phi.clauses):
        lit = next(x for x in clause if assignment[abs(x) - 1] == (x > 0))
        kept.add(reduction.anchors[(j, lit)])
        kept.update(reduction.clause_pads[j])
        if len(clause) == 2:
            kept.add(reduction.clause_vertices[j][2])
    return frozenset(v for v in reduction.graph.vertices if v not in kept)


def decode_assignment(reduction: ReductionOutput, x: Iterable[int]) -> Assignment:
    """x_i is true iff x_i lies outside the K4 found in R_i; K4s must stay inside one clique."""
    x_set = frozenset(x)
    comps = components_within(reduction.graph, (v for v in reduction.graph.vertices if v not in x_set))
    cliques = [reduction.variable_clique(i) for i in range(len(reduction.variable_vertices))]
    cliques += [reduction.clause_clique(j) for j in range(len(reduction.clause_vertices))]
    inside: dict[int, VertexSet] = {}
    for comp in comps:
        owners = [k for k, clique in enumerate(cliques) if comp <= clique]
        if len(owners) != 1:
            raise ContractViolation(f"component {sorted(comp)} is not confined to one gadget clique")
        if owners[0] in inside:
            raise ContractViolation(f"gadget clique {owners[0]} holds two components")
        inside[owners[0]] = comp
    values = []
    for i, (pos, _) in enumerate(reduction.variable_vertices):
        if i not in inside:
            raise ContractViolation(f"variable clique {i + 1} holds no component")
        values.append(pos not in inside[i])
    return tuple(values)


class HarnessStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    BREACH = "breach"
    CEILING = "ceiling"


@dataclass(frozen=True)
class HarnessVerdict:
    status: HarnessStatus
    satisfiable: Optional[bool] = None
    modulator_found: Optional[bool] = None
    reason: str = ""
    assignment: Optional[Assignment] = None
    modulator: Optional[VertexSet] = None

    @property
    def passed(self) -> bool:
        return self.status is HarnessStatus.PASS

    def to_json(self) -> dict[str, Any]:
        return {
            "status": self.status.value,
            "satisfiable": self.satisfiable,
            "modulator_found": self.modulator_found,
            "reason": self.reason,
            "assignment": None if self.assignment is None else list(self.assignment),
            "modulator": None if self.modulator is None else sorted(self.modulator),
        }


def equivalence_harness(
    phi: PlanarCnf,
    reduction: Optional[ReductionOutput] = None,
    ceiling: Optional[int] = DEFAULT_HARNESS_CEILING,
    sat_ceiling: Optional[int] = DEFAULT_SAT_CEILING,
) -> HarnessVerdict:
    """PASS iff phi is satisfiable exactly when G'' has a planar {K4}-modulator."""
    reduction = reduction if reduction is not None else reduce(phi)
    check = check_reduction(reduction, phi)
    if not check:
        return HarnessVerdict(HarnessStatus.BREACH, reason=check.reason)
    k4 = builtin("complete_K4_only")
    try:
        assignment = find_assignment(phi, sat_ceiling)
        satisfiable = assignment is not None
        if assignment is not None:
            forward = forward_modulator(reduction, phi, assignment)
            report = verify_planar_modulator(reduction.graph, k4, forward)
            if not report:
                return HarnessVerdict(
                    HarnessStatus.FAIL,
                    satisfiable=True,
                    reason=f"modulator built from the assignment is rejected: {report.reason}",
                )
        found = brute_force_planar_modulator(reduction.graph, k4, ceiling=ceiling, first_only=True)
    except CeilingExceeded as e:
        return HarnessVerdict(HarnessStatus.CEILING, reason=str(e))

    if (found is not None) != satisfiable:
        return HarnessVerdict(
            HarnessStatus.FAIL,
            satisfiable=satisfiable,
            modulator_found=found is not None,
            reason="satisfiability and modulator existence disagree",
        )
    if found is None:
        return HarnessVerdict(HarnessStatus.PASS, satisfiable=False, modulator_found=False)
    try:
        decoded = decode_assignment(reduction, found.x)
    except ContractViolation as e:
        return HarnessVerdict(
            HarnessStatus.FAIL, satisfiable=True, modulator_found=True, reason=str(e), modulator=found.x
        )
    if not phi.satisfied_by(decoded):
        return HarnessVerdict(
            HarnessStatus.FAIL,
            satisfiable=True,
            modulator_found=True,
            reason="decoded assignment does not satisfy the formula",
            assignment=decoded,
            modulator=found.x,
        )
    return HarnessVerdict(
        HarnessStatus.PASS,
        satisfiable=True,
        modulator_found=True,
        assignment=decoded,
        modulator=found.x,
    )


# --- generation and DIMACS ---------------------------------------------------

MAX_ATTEMPTS = 200


def random_planar_cnf(variables: int, clauses: int, seed: int = 0) -> PlanarCnf:
    """Rejection sampling of formulas meeting the restricted planar SAT conditions."""
    if variables < 1 or clauses < 0:
        raise PreconditionError("need at least one variable and no negative clause count")
    if clauses * 2 > 4 * variables:
        raise PreconditionError(f"{clauses} clauses cannot fit {variables} variables")
    rng = random.Random(seed)
    for attempt in range(MAX_ATTEMPTS):
        budget = {lit: 2 for v in range(1, variables + 1) for lit in (v, -v)}
        built: list[tuple[int, ...]] = []
        for _ in range(clauses):
            size = rng.choice((2, 3))
            pool = sorted(v for v in range(1, variables + 1) if budget[v] or budget[-v])
            if len(pool) < size:
                size = 2
            if len(pool) < size:
                break
            chosen = rng.sample(pool, size)
            clause = []
            for v in chosen:
                options = [lit for lit in (v, -v) if budget[lit]]
                lit = rng.choice(options)
                budget[lit] -= 1
                clause.append(lit)
            built.append(tuple(clause))
        if len(built) != clauses:
            continue
        phi = PlanarCnf(variables, tuple(built))
        try:
            phi.validate()
        except InputError:
            continue
        logger.debug(f"Random planar formula after {attempt + 1} attempts (seed {seed})")
        return phi
    raise PreconditionError(
        f"no planar formula with {variables} variables and {clauses} clauses after {MAX_ATTEMPTS} attempts"
    )


def format_dimacs(phi: PlanarCnf) -> str:
    lines = [f"p cnf {phi.variables} {len(phi.clauses)}"]
    lines += [" ".join(str(lit) for lit in clause) + " 0" for clause in phi.clauses]
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> PlanarCnf:
    variables: Optional[int] = None
    expected = 0
    clauses: list[tuple[int, ...]] = []
    pending: list[int] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"line {number}: malformed header {line!r}")
            try:
                variables, expected = int(parts[2]), int(parts[3])
            except ValueError:
                raise InputError(f"line {number}: malformed header {line!r}") from None
            continue
        if variables is None:
            raise InputError(f"line {number}: clause before the 'p cnf' header")
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise InputError(f"line {number}: {token!r} is not a literal") from None
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if variables is None:
        raise InputError("missing 'p cnf' header")
    if pending:
        raise InputError("last clause is not terminated by 0")
    if len(clauses) != expected:
        raise InputError(f"header announces {expected} clauses, found {len(clauses)}")
    phi = PlanarCnf(variables, tuple(clauses))
    phi.validate()
    return phi
