"""Tests for planar modulators, G-by-H modulators, splitters and self-reduction."""

import random
from itertools import combinations

import pytest

from src.hplanar.decomposition import verify_elimination_sequence
from src.hplanar.errors import InputError, OracleFault, PreconditionError
from src.hplanar.generators import generate_grid
from src.hplanar.graph import Graph, add_edges, complete_graph, cycle_graph, path_graph
from src.hplanar.hclasses import builtin
from src.hplanar.modulator import (
    PADDING_COPIES,
    TargetClass,
    TargetKind,
    big_leaf_GH_search,
    big_leaf_search,
    brute_force_gh_modulator,
    brute_force_planar_modulator,
    elimination_gadget,
    has_planar_modulator,
    is_gh_modulator,
    padding_gadget,
    self_reduce_elimination_sequence,
    self_reduce_modulator,
    verify_planar_modulator,
)
from src.hplanar.splitters import is_splitter, splitter_family


def k5_with_tail(length: int) -> Graph:
    """K5 on 0..4 with a path of `length` vertices hanging off vertex 0."""
    tail = [(5 + i, 6 + i) for i in range(length - 1)]
    return add_edges(complete_graph(5), tail + [(0, 5)], extra_vertices=length)


def smallest_modulator(g: Graph, name: str):
    h = builtin(name)
    for size in range(g.n + 1):
        for chosen in combinations(range(g.n), size):
            if verify_planar_modulator(g, h, frozenset(chosen)):
                return frozenset(chosen)
    return None


class TestVerify:
    def test_accepts_four_vertices_of_k5(self):
        report = verify_planar_modulator(complete_graph(5), builtin("edgeless"), frozenset({0, 1, 2, 3}))
        assert report
        cert = report.modulator.component_certificates
        assert cert[0].component == frozenset({4})
        assert cert[0].neighborhood == frozenset({0, 1, 2, 3})
        assert report.modulator.torso_embedding.is_valid_for(complete_graph(4))

    def test_reports_failing_component(self):
        report = verify_planar_modulator(complete_graph(5), builtin("edgeless"), frozenset())
        assert not report
        assert report.failing_component == frozenset(range(5))

    def test_reports_kuratowski_witness(self):
        report = verify_planar_modulator(complete_graph(5), builtin("edgeless"), frozenset(range(5)))
        assert not report
        assert report.witness.kind == "K5"
        assert set(report.witness.branch_vertices) == set(range(5))

    def test_rejects_foreign_vertex(self):
        assert not verify_planar_modulator(path_graph(2), builtin("edgeless"), frozenset({7}))

    def test_json(self):
        report = verify_planar_modulator(complete_graph(5), builtin("edgeless"), frozenset({0, 1, 2, 3}))
        payload = report.modulator.to_json()
        assert payload["x"] == [0, 1, 2, 3]
        assert payload["components"] == [{"vertices": [4], "neighborhood": [0, 1, 2, 3], "member": True}]


class TestBruteForce:
    def test_k5_edgeless(self):
        found = brute_force_planar_modulator(complete_graph(5), builtin("edgeless"))
        assert found.x == frozenset({0, 1, 2, 3})

    def test_universal_class(self):
        assert brute_force_planar_modulator(complete_graph(6), builtin("all_graphs")).x == frozenset()

    def test_no_modulator(self):
        assert brute_force_planar_modulator(complete_graph(6), builtin("edgeless")) is None

    def test_non_hereditary_class(self):
        # two K4 leaves hanging off one shared vertex
        k4 = complete_graph(4).edges
        cliques = [(1 + u, 1 + v) for u, v in k4] + [(5 + u, 5 + v) for u, v in k4]
        g = Graph(9, cliques + [(0, 1), (0, 5)])
        found = brute_force_planar_modulator(g, builtin("complete_K4_only"))
        assert found.x == frozenset({0})

    @pytest.mark.parametrize("name", ["edgeless", "forests", "cluster"])
    def test_matches_exhaustive_search(self, name):
        rng = random.Random(17)
        for _ in range(12):
            n = rng.randint(5, 8)
            g = Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.6])
            found = brute_force_planar_modulator(g, builtin(name))
            expected = smallest_modulator(g, name)
            assert (found.x if found else None) == expected

    def test_decision(self):
        assert has_planar_modulator(complete_graph(6), builtin("forests"))
        assert not has_planar_modulator(complete_graph(6), builtin("edgeless"))
        assert has_planar_modulator(generate_grid(4, 4), builtin("edgeless"))


class TestBigLeaf:
    def test_finds_big_component(self):
        g = k5_with_tail(5)
        found = big_leaf_search(g, builtin("forests"), 5)
        assert found is not None
        assert verify_planar_modulator(g, builtin("forests"), found.x)
        assert any(len(c.component) >= 5 for c in found.component_certificates)

    def test_threshold_above_order(self):
        assert big_leaf_search(complete_graph(4), builtin("forests"), 5) is None


class TestGHModulator:
    def test_target_parse(self):
        assert TargetClass.parse("ptd:2") == TargetClass(TargetKind.PTD, 2)
        assert str(TargetClass.parse("TW:1")) == "tw:1"
        with pytest.raises(InputError):
            TargetClass.parse("ptd")

    def test_attachment_bounds(self):
        assert TargetClass(TargetKind.PTW, 1).attachment_bound == 4
        assert TargetClass(TargetKind.PTD, 2).attachment_bound == 8
        assert TargetClass(TargetKind.TW, 2).attachment_bound == 3
        assert TargetClass(TargetKind.SIZE, 3).attachment_bound == 3

    def test_brute_force_by_treewidth(self):
        h = builtin("edgeless")
        assert brute_force_gh_modulator(complete_graph(5), h, TargetClass(TargetKind.TW, 2)) is None
        found = brute_force_gh_modulator(complete_graph(5), h, TargetClass(TargetKind.TW, 3))
        assert found.x == frozenset({0, 1, 2, 3})
        assert found.leaf_components == (frozenset({4}),)

    def test_big_leaf_requirement(self):
        h = builtin("forests")
        target = TargetClass(TargetKind.SIZE, 2)
        assert is_gh_modulator(k5_with_tail(3), h, target, frozenset({0, 1}), big_leaf=None) is False
        assert is_gh_modulator(k5_with_tail(3), h, TargetClass(TargetKind.SIZE, 3), frozenset({0, 1, 2}))
        assert not is_gh_modulator(
            k5_with_tail(3), h, TargetClass(TargetKind.SIZE, 3), frozenset({0, 1, 2}), big_leaf=4
        )

    def test_big_leaf_search_on_path(self):
        found = big_leaf_GH_search(path_graph(6), builtin("forests"), TargetClass(TargetKind.SIZE, 1), 3)
        assert found is not None and found.x == frozenset()

    def test_big_leaf_search_result_is_valid(self):
        g = k5_with_tail(5)
        h = builtin("forests")
        target = TargetClass(TargetKind.SIZE, 3)
        found = big_leaf_GH_search(g, h, target, 5, seed=3)
        if found is not None:
            assert is_gh_modulator(g, h, target, found.x, big_leaf=5)

    def test_big_leaf_search_needs_union_closed_class(self):
        with pytest.raises(PreconditionError):
            big_leaf_GH_search(path_graph(4), builtin("complete_K4_only"), TargetClass(TargetKind.SIZE, 1), 2)


class TestSplitters:
    @pytest.mark.parametrize("n, a, b", [(5, 1, 1), (6, 2, 2), (7, 3, 2), (4, 3, 3), (6, 0, 2), (5, 2, 0)])
    def test_covering_property(self, n, a, b):
        assert is_splitter(splitter_family(n, a, b, seed=1))

    def test_seeded(self):
        assert splitter_family(7, 2, 3, seed=5).sets == splitter_family(7, 2, 3, seed=5).sets

    def test_negative_parameters(self):
        with pytest.raises(PreconditionError):
            splitter_family(4, -1, 2)


class TestSelfReduction:
    def test_padding_gadget_connected(self):
        gadget, root = padding_gadget(Graph(2, [(0, 1)]))
        assert root == 0
        assert gadget.n == 1 + PADDING_COPIES and gadget.degree(0) == PADDING_COPIES

    def test_padding_gadget_disconnected(self):
        gadget, root = padding_gadget(Graph(2))
        assert root == 2 * PADDING_COPIES
        assert gadget.degree(root) == 2 * PADDING_COPIES

    def test_elimination_gadget(self):
        gadget, root = elimination_gadget(Graph(2, [(0, 1)]), 1)
        assert root == 0
        assert gadget.n == 4 + 4 * PADDING_COPIES

    def test_k5_with_default_oracle(self):
        found = self_reduce_modulator(complete_graph(5), builtin("edgeless"))
        assert found.x == frozenset({0, 1, 2, 3})

    def test_lying_oracle(self):
        with pytest.raises(OracleFault):
            self_reduce_modulator(complete_graph(5), builtin("edgeless"), decide=lambda graph: True)

    def test_no_modulator(self):
        with pytest.raises(PreconditionError):
            self_reduce_modulator(complete_graph(6), builtin("edgeless"), decide=lambda graph: False)

    def test_needs_hereditary_class(self):
        with pytest.raises(PreconditionError):
            self_reduce_modulator(complete_graph(4), builtin("complete_K4_only"))

    def test_oracle_calls_are_counted_per_vertex(self):
        calls = []

        def oracle(graph):
            calls.append(graph.n)
            return has_planar_modulator(graph, builtin("forests"), ceiling=None)

        found = self_reduce_modulator(cycle_graph(4), builtin("forests"), decide=oracle)
        assert verify_planar_modulator(cycle_graph(4), builtin("forests"), found.x)
        assert len(calls) == 1 + 4

    def test_elimination_sequence_on_planar_graph(self):
        g = generate_grid(2, 3)
        seq = self_reduce_elimination_sequence(g, builtin("edgeless"), 1)
        assert seq.depth == 1
        assert verify_elimination_sequence(g, builtin("edgeless"), seq)

    def test_elimination_sequence_rejects_deep_graph(self):
        with pytest.raises(PreconditionError):
            self_reduce_elimination_sequence(
                complete_graph(6), builtin("edgeless"), 1, decide=lambda graph, depth: False
            )
