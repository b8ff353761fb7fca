"""Tests for matchgates and perfect-matching counting on H-planar graphs."""

import random
from fractions import Fraction

import pytest

from src.hplanar.errors import PreconditionError
from src.hplanar.exact import pmm_bruteforce
from src.hplanar.generators import generate_grid
from src.hplanar.graph import (
    Graph,
    Separation,
    add_edges,
    complete_bipartite_graph,
    complete_graph,
    cycle_graph,
    with_weights,
)
from src.hplanar.hclasses import builtin
from src.hplanar.matchgates import Parity, all_subsets, feasible_subsets, synthesize_matchgate
from src.hplanar.matching import (
    combine_separation_pmm,
    hplanar_pmm,
    pmm_by_blocks,
    run_hplanar_pmm,
)
from src.hplanar.modulator import verify_planar_modulator
from src.hplanar.planarity import is_planar_graph
from src.hplanar.separations import enumerate_separations


def shifted(g: Graph, offset: int) -> list[tuple[int, int]]:
    return [(u + offset, v + offset) for u, v in g.edges]


@pytest.fixture
def cycle_with_leaves():
    """C5 modulator on 0..4 with a K5 on {0, 1}, a K3,3 on {1, 2, 3} and a K4 on {0, 1, 2, 3}."""
    edges = list(cycle_graph(5).edges)
    edges += shifted(complete_graph(5), 5) + [(0, 5), (1, 6)]
    edges += shifted(complete_bipartite_graph(3, 3), 10) + [(1, 10), (2, 11), (3, 12)]
    edges += shifted(complete_graph(4), 16) + [(0, 16), (1, 17), (2, 18), (3, 19)]
    g = Graph(20, edges)
    rng = random.Random(8)
    return with_weights(g, {e: Fraction(rng.randint(1, 4), rng.randint(1, 3)) for e in g.edges})


def stacked_with_leaves(rng: random.Random) -> tuple[Graph, int]:
    """Stacked triangulation on 0..m-1 with small leaves on its edges, triangles and K4s.

    Every triangle the stacking opens up stays a triangle of the modulator, so leaves on
    them sit in disks that hold modulator vertices.
    """
    edges = [(0, 1), (0, 2), (1, 2)]
    faces = [(0, 1, 2), (0, 1, 2)]
    triangles = [(0, 1, 2)]
    quads = []
    n = 3
    for _ in range(rng.randint(1, 4)):
        a, b, c = faces.pop(rng.randrange(len(faces)))
        edges += [(a, n), (b, n), (c, n)]
        faces += [(a, b, n), (b, c, n), (a, c, n)]
        triangles += [(a, b, n), (b, c, n), (a, c, n)]
        quads.append((a, b, c, n))
        n += 1
    m = n
    skeleton = list(edges)
    for _ in range(rng.randint(1, 3)):
        boundary = rng.choice([rng.choice(skeleton), rng.choice(triangles), rng.choice(triangles), rng.choice(quads)])
        size = rng.randint(1, 3)
        if n + size > 15:
            break
        leaf = list(range(n, n + size))
        edges += [(u, v) for i, u in enumerate(leaf) for v in leaf[i + 1:] if v == u + 1 or rng.random() < 0.5]
        for b in boundary:
            edges += [(b, u) for u in leaf if u == leaf[0] or rng.random() < 0.3]
        n += size
    if n % 2:
        a, b = rng.choice(skeleton)
        edges += [(a, n), (b, n)]
        n += 1
    g = Graph(n, sorted({(min(u, v), max(u, v)) for u, v in edges}))
    return with_weights(g, {e: Fraction(rng.randint(1, 5), rng.randint(1, 3)) for e in g.edges}), m


class TestMatchgates:
    def test_feasible_subsets(self):
        assert feasible_subsets(2, Parity.EVEN) == [frozenset(), frozenset({0, 1})]
        assert feasible_subsets(3, Parity.ODD) == [
            frozenset({0}),
            frozenset({1}),
            frozenset({2}),
            frozenset({0, 1, 2}),
        ]

    def test_parity_of(self):
        assert Parity.of(4) is Parity.EVEN and Parity.of(3) is Parity.ODD

    @pytest.mark.parametrize("size", [2, 3])
    @pytest.mark.parametrize("parity", [Parity.EVEN, Parity.ODD])
    def test_realizes_random_vectors(self, size, parity):
        rng = random.Random(size * 10 + len(parity.value))
        for _ in range(40):
            p = {
                gamma: Fraction(rng.choice([0, 0, 1, 2, 3]), rng.randint(1, 4))
                for gamma in feasible_subsets(size, parity)
            }
            gadget = synthesize_matchgate(size, parity, p)
            assert is_planar_graph(gadget.graph)
            for gamma in all_subsets(size):
                assert gadget.realized(gamma) == p.get(gamma, 0)

    def test_rejects_wrong_parity_entry(self):
        p = {frozenset(): Fraction(1), frozenset({0, 1}): Fraction(1), frozenset({0}): Fraction(2)}
        with pytest.raises(PreconditionError, match="wrong parity"):
            synthesize_matchgate(2, Parity.EVEN, p)

    def test_rejects_missing_entry(self):
        with pytest.raises(PreconditionError, match="missing"):
            synthesize_matchgate(2, Parity.EVEN, {frozenset(): Fraction(1)})

    def test_rejects_negative_entry(self):
        p = {frozenset({0}): Fraction(-1), frozenset({1}): Fraction(1)}
        with pytest.raises(PreconditionError, match="negative"):
            synthesize_matchgate(2, Parity.ODD, p)

    def test_rejects_large_boundary(self):
        with pytest.raises(PreconditionError):
            synthesize_matchgate(4, Parity.EVEN, {})


class TestSeparationCombination:
    def test_grid_cut_in_half(self):
        g = generate_grid(2, 4)
        sep = Separation(left=frozenset({0, 1, 4, 5}), right=frozenset({1, 2, 3, 5, 6, 7}))
        assert combine_separation_pmm(g, sep) == 5

    @pytest.mark.slow
    def test_random_separations(self):
        rng = random.Random(21)
        checked = 0
        while checked < 200:
            n = rng.choice([6, 8])
            g = Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.45])
            g = with_weights(g, {e: rng.randint(1, 3) for e in g.edges})
            for sep in enumerate_separations(g, 3, n):
                if sep.order < 2:
                    continue
                assert combine_separation_pmm(g, sep) == pmm_bruteforce(g)
                checked += 1

    def test_rejects_wrong_order(self):
        sep = Separation(left=frozenset({0, 1}), right=frozenset({1, 2, 3}))
        with pytest.raises(PreconditionError):
            combine_separation_pmm(Graph(4, [(0, 1), (1, 2), (2, 3)]), sep)

    def test_rejects_non_separation(self):
        sep = Separation(left=frozenset({0, 1, 2}), right=frozenset({1, 2, 3}))
        with pytest.raises(PreconditionError):
            combine_separation_pmm(complete_graph(4), sep)


class TestBlocks:
    def test_pendant_on_k5(self):
        g = add_edges(complete_graph(5), [(0, 5)], extra_vertices=1)
        assert pmm_by_blocks(g) == 3 == pmm_bruteforce(g)

    def test_bridged_cliques(self):
        # the bridge must be used: K4 on one side times K5 plus pendant on the other
        g = Graph(10, shifted(complete_graph(5), 0) + shifted(complete_graph(5), 5) + [(4, 5)])
        assert pmm_by_blocks(g) == 9 == pmm_bruteforce(g)

    def test_member_of_class(self):
        k4 = builtin("complete_K4_only")
        assert pmm_by_blocks(complete_graph(4), k4) == 3

    def test_odd_order(self):
        assert pmm_by_blocks(complete_graph(5)) == 0


class TestHPlanarCount:
    def test_matches_brute_force(self, cycle_with_leaves):
        run = run_hplanar_pmm(cycle_with_leaves, builtin("all_graphs"), range(5))
        assert run.value == pmm_bruteforce(cycle_with_leaves, ceiling=None)
        kinds = [step.kind for step in run.steps]
        assert "branch" in kinds and "gadget" in kinds

    def test_transcript_json(self, cycle_with_leaves):
        run = run_hplanar_pmm(cycle_with_leaves, builtin("all_graphs"), range(5))
        payload = run.to_json()
        assert Fraction(payload["value"]) == run.value
        assert len(payload["steps"]) == len(run.steps)

    def test_instrumented_small_instance(self):
        # K5 hanging off the square 0-1-2-3 through vertices 0 and 1, a K3,3 on 1, 2, 3 and a pendant on 3
        edges = list(cycle_graph(4).edges) + shifted(complete_graph(5), 4) + [(0, 4), (1, 5)]
        edges += shifted(complete_bipartite_graph(3, 3), 9) + [(2, 9), (3, 10), (1, 11)]
        g = Graph(16, edges + [(3, 15)])
        run = run_hplanar_pmm(g, builtin("all_graphs"), range(4), instrument=True)
        assert run.value == pmm_bruteforce(g)

    def test_cut_vertex_boundary(self):
        # K5 hanging off a single vertex of the square, a pendant on another
        g = add_edges(cycle_graph(4), shifted(complete_graph(5), 4) + [(0, 4)], extra_vertices=5)
        g = add_edges(g, [(1, 9)], extra_vertices=1)
        value = hplanar_pmm(g, builtin("all_graphs"), range(4))
        assert value == pmm_bruteforce(g)

    def test_forest_leaves_with_class_solver(self):
        g = add_edges(generate_grid(3, 3), [(9, 10), (10, 11), (0, 9), (8, 11)], extra_vertices=3)
        x = range(9)
        assert hplanar_pmm(g, builtin("forests"), x) == pmm_bruteforce(g)

    @pytest.mark.parametrize("path_length, expected", [(0, 6), (20, 8)])
    def test_leaf_inside_separating_triangle(self, path_length, expected):
        # K5 minus 3-4 separates 3 from 4 by the triangle 0-1-2; vertex 5 sees exactly that
        # triangle and the modulator path from 3 back to 0 runs through the face 3-0-1
        edges = [e for e in complete_graph(5).edges if e != (3, 4)] + [(0, 5), (1, 5), (2, 5)]
        path = [3] + list(range(6, 6 + path_length)) + [0]
        if path_length:
            edges += list(zip(path, path[1:]))
        g = Graph(6 + path_length, edges)
        x = [v for v in g.vertices if v != 5]
        assert verify_planar_modulator(g, builtin("edgeless"), frozenset(x))
        run = run_hplanar_pmm(g, builtin("edgeless"), x)
        assert run.final_planar
        assert run.value == expected
        assert [step.kind for step in run.steps][-1] == "fkt"
        assert any(step.inside for step in run.steps if step.kind == "gadget")
        if g.n <= 18:
            assert run.value == pmm_bruteforce(g)

    def test_four_neighbourhood_branches_inside_vertex(self):
        # the leaf 4-5 sees the whole K4; exactly one K4 vertex lies inside the other three
        g = Graph(6, list(complete_graph(4).edges) + [(0, 4), (1, 4), (2, 4), (4, 5), (3, 5)])
        run = run_hplanar_pmm(g, builtin("forests"), range(4), instrument=True)
        assert run.value == pmm_bruteforce(g)
        branches = [step for step in run.steps if step.kind == "branch"]
        assert branches and branches[0].variant == "inside"

    @pytest.mark.slow
    def test_random_leaves_in_torso_disks(self):
        for seed in range(200):
            rng = random.Random(seed)
            g, m = stacked_with_leaves(rng)
            h = builtin("all_graphs")
            assert verify_planar_modulator(g, h, frozenset(range(m)))
            run = run_hplanar_pmm(g, h, range(m))
            assert run.final_planar
            assert run.value == pmm_bruteforce(g, ceiling=None), f"seed {seed}"

    def test_rejects_non_modulator(self):
        with pytest.raises(PreconditionError):
            hplanar_pmm(complete_graph(6), builtin("edgeless"), [0])

    def test_random_h_planar_graphs(self):
        rng = random.Random(13)
        for _ in range(8):
            base = generate_grid(2, 3)
            edges = list(base.edges)
            n = base.n
            for _ in range(rng.randint(1, 3)):
                size = rng.choice([2, 3, 4, 5])
                leaf = [(n + u, n + v) for u, v in complete_graph(size).edges]
                anchors = rng.sample(range(base.n), rng.randint(1, 3))
                links = [(a, n + rng.randrange(size)) for a in anchors]
                edges += leaf + list({(a, b) for a, b in links})
                n += size
            g = Graph(n, edges)
            g = with_weights(g, {e: rng.randint(1, 3) for e in g.edges})
            if g.n > 18 or not verify_planar_modulator(g, builtin("all_graphs"), frozenset(range(base.n))):
                continue
            assert hplanar_pmm(g, builtin("all_graphs"), range(base.n)) == pmm_bruteforce(g)
