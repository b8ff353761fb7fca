"""Tests for planarity, planar coloring, few-layer decompositions, FKT and the exact solvers."""

import random
from fractions import Fraction

import pytest

from src.hplanar.config import DEFAULT_INDEPENDENT_CEILING
from src.hplanar.errors import CeilingExceeded, PreconditionError
from src.hplanar.exact import (
    chromatic_number,
    find_coloring,
    is_independent,
    is_proper_coloring,
    max_independent_set,
    min_deletion_set,
    pmm_bruteforce,
)
from src.hplanar.fkt import fkt_pmm
from src.hplanar.generators import generate_grid, generate_wall
from src.hplanar.graph import (
    Graph,
    complete_bipartite_graph,
    complete_graph,
    cycle_graph,
    disjoint_union,
    path_graph,
    with_weights,
)
from src.hplanar.planarity import (
    RotationSystem,
    bfs_layers,
    few_layer_tree_decomposition,
    is_planar,
    is_planar_graph,
    normalize_colors,
    planar_color,
    planar_edges,
)
from src.hplanar.treedec import verify_tree_decomposition


def random_planar_graph(rng: random.Random, n: int, attempts: int = 36) -> Graph:
    edges: list[tuple[int, int]] = []
    for _ in range(attempts):
        u, v = rng.sample(range(n), 2)
        e = (min(u, v), max(u, v))
        if e in edges:
            continue
        if planar_edges(n, edges + [e]):
            edges.append(e)
    return Graph(n, edges)


class TestPlanarity:
    def test_k4_is_planar(self):
        result = is_planar(complete_graph(4))
        assert result
        assert result.rotation is not None
        assert result.rotation.is_valid_for(complete_graph(4))

    def test_k5_witness(self):
        result = is_planar(complete_graph(5))
        assert not result
        assert result.witness.kind == "K5"
        assert len(result.witness.branch_vertices) == 5

    def test_k33_witness(self):
        result = is_planar(complete_bipartite_graph(3, 3))
        assert not result
        assert result.witness.kind == "K3,3"

    def test_edge_count_shortcut(self):
        assert not planar_edges(6, complete_graph(6).edges)

    def test_grid_faces_follow_euler(self):
        g = generate_grid(3, 4)
        rotation = is_planar(g).rotation
        assert len(rotation.faces()) == 2 - g.n + g.m

    def test_rotation_rejects_wrong_edges(self):
        bogus = RotationSystem(order={0: (1,), 1: (0,), 2: ()})
        assert not bogus.is_valid_for(path_graph(3))

    def test_rotation_json_round_trip(self):
        rotation = is_planar(generate_wall(3)).rotation
        assert RotationSystem.from_json(rotation.to_json()) == rotation

    def test_restriction_embeds_induced_subgraph(self):
        g = generate_grid(3, 3)
        rotation = is_planar(g).rotation
        sub = rotation.restrict({0, 1, 3, 4}).relabel({0: 0, 1: 1, 3: 2, 4: 3})
        assert sub.is_valid_for(Graph(4, [(0, 1), (0, 2), (1, 3), (2, 3)]))


class TestPlanarColoring:
    def test_normalize_colors(self):
        assert normalize_colors([7, 3, 7, 9]) == ((0, 1, 0, 2), 3)

    def test_odd_cycle_needs_three(self):
        coloring = planar_color(cycle_graph(5))
        assert coloring.color_count == 3 and coloring.is_proper(cycle_graph(5))

    def test_k4_needs_four(self):
        coloring = planar_color(complete_graph(4))
        assert coloring.color_count == 4
        assert coloring.palette == 4

    def test_large_graph_falls_back_to_five(self):
        g = generate_grid(5, 5)
        coloring = planar_color(g, ceiling=3)
        assert coloring.palette == 5
        assert coloring.is_proper(g)
        assert coloring.color_count <= 5

    def test_rejects_non_planar(self):
        with pytest.raises(PreconditionError):
            planar_color(complete_graph(5))

    def test_random_planar_graphs(self):
        rng = random.Random(2)
        for _ in range(15):
            g = random_planar_graph(rng, rng.randint(4, 12))
            coloring = planar_color(g)
            assert coloring.is_proper(g)
            assert coloring.color_count == chromatic_number(g)[0]


class TestLayers:
    def test_path_layers(self):
        layering = bfs_layers(path_graph(4), 0)
        assert layering.layers == (frozenset({0}), frozenset({1}), frozenset({2}), frozenset({3}))

    def test_unreachable_vertices_kept_apart(self):
        g = disjoint_union(path_graph(2), path_graph(2))
        layering = bfs_layers(g, 0)
        assert layering.unreachable == frozenset({2, 3})

    def test_root_set(self):
        layering = bfs_layers(path_graph(5), [0, 4])
        assert layering.layer_of()[2] == 2

    def test_bad_root(self):
        with pytest.raises(PreconditionError):
            bfs_layers(path_graph(2), 5)


class TestFewLayerDecomposition:
    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_grid(self, k):
        g = generate_grid(k, k)
        layers = (k + 1) // 2
        td = few_layer_tree_decomposition(g, layers)
        assert verify_tree_decomposition(g, td)
        assert td.width <= 3 * layers - 1

    def test_disconnected_input(self):
        g = disjoint_union(cycle_graph(4), complete_graph(3))
        td = few_layer_tree_decomposition(g, 1)
        assert verify_tree_decomposition(g, td)

    def test_rejects_non_planar(self):
        with pytest.raises(PreconditionError):
            few_layer_tree_decomposition(complete_graph(5), 3)


class TestFkt:
    def test_grid_two_by_four(self):
        g = generate_grid(2, 4)
        assert fkt_pmm(g) == 5
        assert pmm_bruteforce(g) == 5

    def test_odd_order(self):
        assert fkt_pmm(path_graph(3)) == 0

    def test_empty_graph(self):
        assert fkt_pmm(Graph(0)) == 1

    def test_weighted_cycle(self):
        g = with_weights(cycle_graph(4), {(0, 1): 2, (2, 3): Fraction(1, 3), (1, 2): 5})
        # matchings {01, 23} and {12, 03}
        assert fkt_pmm(g) == Fraction(2, 3) + 5

    def test_component_with_odd_order(self):
        g = disjoint_union(cycle_graph(3), path_graph(3))
        assert fkt_pmm(g) == 0

    def test_rejects_non_planar(self):
        with pytest.raises(PreconditionError):
            fkt_pmm(complete_bipartite_graph(3, 3))

    @pytest.mark.slow
    def test_agrees_with_brute_force(self):
        rng = random.Random(4)
        for _ in range(1000):
            n = rng.choice([4, 6, 8, 10, 12, 14])
            g = random_planar_graph(rng, n, attempts=4 * n)
            weights = {e: Fraction(rng.randint(1, 5), rng.randint(1, 3)) for e in g.edges}
            g = with_weights(g, weights)
            assert fkt_pmm(g) == pmm_bruteforce(g)


class TestExact:
    def test_find_coloring_respects_palette(self):
        assert find_coloring(cycle_graph(5), 2) is None
        colors = find_coloring(cycle_graph(5), 3)
        assert colors is not None and is_proper_coloring(cycle_graph(5), colors)

    def test_chromatic_number_of_clique(self):
        k, colors = chromatic_number(complete_graph(5))
        assert k == 5 and len(set(colors)) == 5

    def test_chromatic_number_empty(self):
        assert chromatic_number(Graph(0)) == (0, ())

    def test_independent_set_of_cycle(self):
        chosen = max_independent_set(cycle_graph(7))
        assert len(chosen) == 3
        assert is_independent(cycle_graph(7), chosen)

    def test_independent_set_has_its_own_ceiling(self):
        sparse = Graph(DEFAULT_INDEPENDENT_CEILING + 1, [(0, 1)])
        with pytest.raises(CeilingExceeded) as excinfo:
            max_independent_set(sparse)
        assert excinfo.value.routine == "max_independent_set"
        assert excinfo.value.ceiling == DEFAULT_INDEPENDENT_CEILING
        assert len(max_independent_set(sparse, ceiling=None)) == sparse.n - 1

    def test_min_deletion_to_edgeless(self):
        deleted = min_deletion_set(cycle_graph(6), lambda h: h.m == 0, budget=5)
        assert deleted is not None and len(deleted) == 3

    def test_min_deletion_over_budget(self):
        assert min_deletion_set(complete_graph(4), lambda h: h.m == 0, budget=2) is None

    def test_pmm_of_k4(self):
        assert pmm_bruteforce(complete_graph(4)) == 3

    def test_pmm_ceiling(self):
        with pytest.raises(CeilingExceeded):
            pmm_bruteforce(path_graph(30))

    def test_planar_graph_check(self):
        assert is_planar_graph(generate_wall(5))
