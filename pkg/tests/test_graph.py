"""Tests for graph core: graphs, torsos, separations, minors and generators."""

import random
from fractions import Fraction
from itertools import product

import pytest

from src.hplanar.errors import CeilingExceeded, InputError, PreconditionError
from src.hplanar.generators import generate_apex_grid, generate_grid, generate_wall, wall_layout
from src.hplanar.graph import (
    Graph,
    Separation,
    complete_graph,
    connected_components,
    cycle_graph,
    disjoint_union,
    from_networkx,
    induced_subgraph,
    neighborhood,
    path_graph,
    torso,
    torso_edges,
)
from src.hplanar.minors import find_minor
from src.hplanar.planarity import is_planar_graph
from src.hplanar.separations import enumerate_separations, is_unbreakable


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


@pytest.fixture
def star():
    return Graph(6, [(0, v) for v in range(1, 6)])


class TestGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(InputError, match="self-loop"):
            Graph(3, [(1, 1)])

    def test_rejects_parallel_edge(self):
        with pytest.raises(InputError, match="parallel"):
            Graph(3, [(0, 1), (1, 0)])

    def test_rejects_out_of_range_endpoint(self):
        with pytest.raises(InputError, match="outside"):
            Graph(2, [(0, 2)])

    def test_rejects_weight_on_missing_edge(self):
        with pytest.raises(InputError, match="missing edge"):
            Graph(3, [(0, 1)], {(1, 2): 2})

    def test_rejects_negative_weight(self):
        with pytest.raises(InputError, match="negative"):
            Graph(2, [(0, 1)], {(0, 1): Fraction(-1, 2)})

    def test_default_weight_is_one(self):
        g = Graph(3, [(0, 1), (1, 2)], {(2, 1): "3/4"})
        assert g.weight(0, 1) == 1
        assert g.weight(1, 2) == Fraction(3, 4)
        assert g.explicit_weights == {(1, 2): Fraction(3, 4)}

    def test_adjacency_is_symmetric(self):
        g = cycle_graph(5)
        for u, v in g.edges:
            assert g.has_edge(u, v) and g.has_edge(v, u)

    def test_equality_includes_weights(self):
        assert Graph(2, [(0, 1)]) == Graph(2, [(1, 0)])
        assert Graph(2, [(0, 1)]) != Graph(2, [(0, 1)], {(0, 1): 2})

    def test_networkx_round_trip(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3)], {(1, 2): Fraction(5, 3)})
        back, labels = from_networkx(g.to_networkx())
        assert back == g
        assert labels == (0, 1, 2, 3)


class TestTorso:
    def test_full_set_is_identity(self):
        g = cycle_graph(6)
        assert torso(g, g.vertices) == g

    def test_path_ends(self):
        assert torso(path_graph(3), {0, 2}) == Graph(2, [(0, 1)])

    def test_star_leaves_form_clique(self, star):
        assert torso(star, range(1, 6)) == complete_graph(5)

    def test_empty_set(self):
        assert torso(cycle_graph(4), set()).n == 0

    def test_weights_are_dropped(self):
        g = Graph(3, [(0, 1), (1, 2)], {(0, 1): 7})
        assert not torso(g, {0, 1}).is_weighted

    @pytest.mark.slow
    def test_component_neighborhoods_become_cliques(self):
        rng = random.Random(11)
        for _ in range(300):
            n = rng.randint(2, 12)
            g = random_graph(rng, n, 0.3)
            x = {v for v in g.vertices if rng.random() < 0.5}
            edges = torso_edges(g, x)
            rest = [v for v in g.vertices if v not in x]
            for comp in connected_components(induced_subgraph(g, rest)[0]):
                original = {rest[i] for i in comp}
                boundary = sorted(neighborhood(g, original))
                for i, u in enumerate(boundary):
                    for v in boundary[i + 1:]:
                        assert (u, v) in edges


class TestComponentsAndNeighborhoods:
    def test_edgeless(self):
        assert connected_components(Graph(3)) == [frozenset({0}), frozenset({1}), frozenset({2})]

    def test_connected(self):
        assert connected_components(cycle_graph(5)) == [frozenset(range(5))]

    def test_disjoint_cycles(self):
        g = disjoint_union(cycle_graph(3), cycle_graph(4))
        assert sorted(len(c) for c in connected_components(g)) == [3, 4]

    def test_neighborhood_of_everything_is_empty(self):
        g = cycle_graph(4)
        assert neighborhood(g, g.vertices) == frozenset()

    def test_neighborhood_of_middle(self):
        assert neighborhood(path_graph(3), {1}) == frozenset({0, 2})

    def test_neighborhood_in_clique(self):
        assert neighborhood(complete_graph(4), {2}) == frozenset({0, 1, 3})

    def test_induced_subgraph_keeps_weights(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3)], {(2, 3): 5})
        sub, labels = induced_subgraph(g, [3, 2])
        assert labels == (2, 3)
        assert sub.weight(0, 1) == 5


class TestSeparations:
    def test_clique_has_none(self):
        assert list(enumerate_separations(complete_graph(5), 3, 10)) == []

    def test_path_cut_at_internal_vertices(self):
        boundaries = {sep.boundary for sep in enumerate_separations(path_graph(4), 1, 4)}
        assert frozenset({1}) in boundaries
        assert frozenset({2}) in boundaries

    def test_cycle_split_at_opposite_vertices(self):
        seps = list(enumerate_separations(cycle_graph(4), 2, 3))
        assert len(seps) == 4
        assert {sep.boundary for sep in seps} == {frozenset({0, 2}), frozenset({1, 3})}

    def test_trivial_separations_on_request(self):
        seps = list(enumerate_separations(complete_graph(4), 0, 1, include_trivial=True))
        assert seps == [Separation(left=frozenset(range(4)), right=frozenset())]

    @pytest.mark.slow
    def test_every_yielded_separation_is_valid(self):
        rng = random.Random(3)
        for _ in range(200):
            g = random_graph(rng, rng.randint(3, 9), 0.35)
            for sep in enumerate_separations(g, 2, g.n):
                assert sep.is_valid(g)
                assert sep.order <= 2

    def test_negative_order_rejected(self):
        with pytest.raises(PreconditionError):
            list(enumerate_separations(path_graph(3), -1, 2))

    def test_ceiling(self):
        with pytest.raises(CeilingExceeded):
            list(enumerate_separations(path_graph(30), 1, 2))


class TestUnbreakable:
    def test_clique_is_unbreakable(self):
        assert is_unbreakable(complete_graph(6), 2, 1)

    def test_bridged_cliques(self):
        k5 = complete_graph(5)
        g = Graph(10, list(disjoint_union(k5, k5).edges) + [(4, 5)])
        report = is_unbreakable(g, 4, 2)
        assert not report
        assert report.witness is not None and report.witness.is_valid(g)
        assert report.witness.order <= 2

    def test_star_centre_separates(self):
        g = Graph(10, [(0, v) for v in range(1, 10)])
        report = is_unbreakable(g, 2, 1)
        assert not report
        assert report.witness.boundary == frozenset({0})

    @pytest.mark.slow
    def test_agrees_with_partition_search(self):
        rng = random.Random(5)

        def breakable(g: Graph, s: int, c: int) -> bool:
            for sides in product((0, 1, 2), repeat=g.n):
                left = [v for v in g.vertices if sides[v] == 0]
                right = [v for v in g.vertices if sides[v] == 2]
                if len(left) < s or len(right) < s or g.n - len(left) - len(right) > c:
                    continue
                if not any(sides[u] + sides[v] == 2 and sides[u] != 1 for u, v in g.edges):
                    return True
            return False

        for _ in range(200):
            g = random_graph(rng, rng.randint(3, 7), 0.4)
            s, c = rng.randint(1, 3), rng.randint(0, 2)
            assert bool(is_unbreakable(g, s, c)) == (not breakable(g, s, c))


class TestMinors:
    def test_triangle_in_cycle(self):
        host = cycle_graph(5)
        model = find_minor(host, complete_graph(3))
        assert model is not None
        assert model.is_valid(host, complete_graph(3))

    def test_no_k5_in_planar_grid(self):
        assert find_minor(generate_grid(3, 3), complete_graph(5)) is None

    def test_k4_in_three_by_three_grid(self):
        # treewidth 3, so a K4 model exists
        host = generate_grid(3, 3)
        model = find_minor(host, complete_graph(4))
        assert model is not None and model.is_valid(host, complete_graph(4))

    def test_planar_hosts_never_hold_k5(self):
        rng = random.Random(9)
        checked = 0
        while checked < 15:
            g = random_graph(rng, rng.randint(5, 8), 0.5)
            if not is_planar_graph(g):
                continue
            checked += 1
            assert find_minor(g, complete_graph(5)) is None

    def test_pattern_ceiling(self):
        with pytest.raises(CeilingExceeded):
            find_minor(complete_graph(10), complete_graph(9))


class TestGenerators:
    def test_two_by_two_grid_is_c4(self):
        g = generate_grid(2, 2)
        assert g.n == 4 and g.m == 4
        assert all(g.degree(v) == 2 for v in g.vertices)

    def test_grid_numbering_is_row_major(self):
        g = generate_grid(2, 3)
        assert g.has_edge(0, 1) and g.has_edge(0, 3) and not g.has_edge(2, 3)

    def test_wall_of_height_three(self):
        g = generate_wall(3)
        assert g.n == 16 and g.m == 19
        assert max(g.degree(v) for v in g.vertices) == 3
        assert is_planar_graph(g)

    def test_wall_layout_perimeter_is_a_cycle(self):
        layout = wall_layout(5)
        perimeter = layout.perimeter
        for a, b in zip(perimeter, perimeter[1:] + perimeter[:1]):
            assert layout.graph.has_edge(a, b)
        assert layout.pegs <= set(perimeter)
        assert all(layout.graph.degree(v) == 2 for v in layout.pegs)
        assert len(layout.layers) == 2

    def test_wall_needs_odd_height(self):
        with pytest.raises(InputError):
            generate_wall(4)

    def test_apex_grid(self):
        g = generate_apex_grid(3)
        assert g.n == 10
        assert g.degree(9) == 9
