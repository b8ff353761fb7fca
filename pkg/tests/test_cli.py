"""Tests for the command-line entry point."""

import json

import jsonschema
import pytest

from src.hplanar.__main__ import EXIT_CEILING, EXIT_FALSE, EXIT_INPUT, EXIT_OK, run
from src.hplanar.decomposition import planar_treedepth_exact
from src.hplanar.errors import InputError
from src.hplanar.generators import generate_grid
from src.hplanar.graph import Graph, add_edges, complete_graph, path_graph
from src.hplanar.graph_io import format_graph_text
from src.hplanar.schemas import load_schema, schema_names


@pytest.fixture
def cli(tmp_path, monkeypatch):
    """Run the CLI without picking up a stray .env file or writing a ledger into the cwd."""
    monkeypatch.setenv("HPLANAR_LEDGER_PATH", str(tmp_path / "ledger.db"))
    env_file = str(tmp_path / "absent.env")

    def invoke(*argv: str) -> int:
        return run(["--env-file", env_file, *argv])

    return invoke


@pytest.fixture
def write_graph(tmp_path):
    def write(g: Graph, name: str = "g.txt") -> str:
        path = tmp_path / name
        path.write_text(format_graph_text(g))
        return str(path)

    return write


def k5_on_grid() -> Graph:
    k5 = [(9 + u, 9 + v) for u, v in complete_graph(5).edges]
    return add_edges(generate_grid(3, 3), k5 + [(0, 9), (1, 10)], extra_vertices=5)


@pytest.fixture
def grid_with_k5():
    return k5_on_grid()


class TestModulatorCommands:
    def test_check_valid(self, cli, write_graph, capsys):
        code = cli("check-modulator", write_graph(complete_graph(5)), "--x", "0,1,2,3", "--hclass", "edgeless")
        assert code == EXIT_OK
        assert capsys.readouterr().out.strip() == "valid"

    def test_check_invalid_json(self, cli, write_graph, capsys):
        code = cli(
            "--format", "json", "check-modulator", write_graph(complete_graph(5)),
            "--x", "0", "--hclass", "edgeless",
        )
        assert code == EXIT_FALSE
        payload = json.loads(capsys.readouterr().out)
        assert payload["ok"] is False and payload["failing_component"] == [1, 2, 3, 4]

    def test_find_brute(self, cli, write_graph, capsys):
        assert cli("find-modulator", "brute", write_graph(complete_graph(5)), "--hclass", "edgeless") == EXIT_OK
        assert "modulator: 0,1,2,3" in capsys.readouterr().out

    def test_find_absent(self, cli, write_graph, capsys):
        assert cli("find-modulator", "brute", write_graph(complete_graph(6)), "--hclass", "edgeless") == EXIT_FALSE
        assert capsys.readouterr().out.strip() == "absent"

    def test_find_selfreduce(self, cli, write_graph, capsys):
        assert cli("find-modulator", "selfreduce", write_graph(complete_graph(5)), "--hclass", "edgeless") == EXIT_OK
        assert "size: 4" in capsys.readouterr().out

    def test_bigleaf_needs_threshold(self, cli, write_graph, capsys):
        assert cli("find-modulator", "bigleaf", write_graph(path_graph(4)), "--hclass", "forests") == EXIT_INPUT
        assert "needs --a" in capsys.readouterr().err


class TestWidthCommands:
    def test_ptd(self, cli, write_graph, capsys):
        assert cli("ptd", write_graph(complete_graph(5))) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0] == "ptd: 2"

    def test_ptd_above_bound(self, cli, write_graph, capsys):
        assert cli("ptd", write_graph(complete_graph(5)), "--k-max", "1") == EXIT_FALSE
        assert capsys.readouterr().out.strip() == "above 1"

    def test_ptd_verify(self, cli, write_graph, tmp_path, capsys):
        seq = planar_treedepth_exact(complete_graph(5)).sequence
        cert = tmp_path / "seq.json"
        cert.write_text(json.dumps(seq.to_json()))
        assert cli("ptd", write_graph(complete_graph(5)), "--verify", str(cert)) == EXIT_OK
        assert capsys.readouterr().out.strip() == "valid, depth 2"

    def test_ptw_round_trip(self, cli, write_graph, tmp_path, capsys):
        graph = write_graph(complete_graph(5))
        assert cli("--format", "json", "ptw-verify", graph) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        cert = tmp_path / "pw.json"
        cert.write_text(json.dumps(payload["decomposition"]))
        assert cli("ptw-verify", graph, str(cert), "--k", str(payload["value"])) == EXIT_OK
        assert cli("ptw-verify", graph, str(cert), "--k", "0") == EXIT_FALSE

    def test_ptw_verify_needs_k(self, cli, write_graph, tmp_path):
        cert = tmp_path / "pw.json"
        cert.write_text("{}")
        assert cli("ptw-verify", write_graph(complete_graph(3)), str(cert)) == EXIT_INPUT


class TestCountingCommands:
    def test_fkt(self, cli, write_graph, capsys):
        assert cli("pmm", "fkt", write_graph(generate_grid(2, 4))) == EXIT_OK
        assert capsys.readouterr().out.strip() == "5"

    def test_fkt_rejects_non_planar(self, cli, write_graph):
        assert cli("pmm", "fkt", write_graph(complete_graph(5))) == EXIT_INPUT

    def test_brute_ceiling(self, cli, write_graph, capsys):
        assert cli("--pmm-ceiling", "2", "pmm", "brute", write_graph(complete_graph(4))) == EXIT_CEILING
        assert "exceeds ceiling 2" in capsys.readouterr().err

    def test_bad_ceiling_flag(self, cli, write_graph):
        assert cli("--pmm-ceiling", "lots", "pmm", "brute", write_graph(complete_graph(4))) == EXIT_INPUT

    def test_hplanar_with_transcript(self, cli, write_graph, grid_with_k5, capsys):
        graph = write_graph(grid_with_k5)
        code = cli(
            "--format", "json", "pmm", "hplanar", graph,
            "--hclass", "all_graphs", "--x", "0,1,2,3,4,5,6,7,8", "--transcript",
        )
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["transcript"]["value"] == payload["value"]

    def test_hplanar_needs_class(self, cli, write_graph):
        assert cli("pmm", "hplanar", write_graph(complete_graph(4))) == EXIT_INPUT


class TestApproximationCommands:
    def test_baker(self, cli, write_graph, capsys):
        code = cli(
            "baker-is", write_graph(generate_grid(3, 3)), "--hclass", "edgeless",
            "--epsilon", "1/2", "--x", "0,1,2,3,4,5,6,7,8",
        )
        assert code == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert out[2] == "k: 4"

    def test_baker_bad_epsilon(self, cli, write_graph):
        code = cli("baker-is", write_graph(generate_grid(2, 2)), "--hclass", "edgeless", "--epsilon", "2")
        assert code == EXIT_INPUT

    def test_color(self, cli, write_graph, grid_with_k5, capsys):
        code = cli("--format", "json", "color", write_graph(grid_with_k5), "--hclass", "all_graphs", "--x", "0,1,2,3,4,5,6,7,8")
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["color_count"] <= payload["bound"]


class TestMiscCommands:
    def test_gen_grid(self, cli, capsys):
        assert cli("gen", "grid", "2", "2") == EXIT_OK
        assert capsys.readouterr().out == "4 4\n0 1\n0 2\n1 3\n2 3\n"

    def test_gen_grid_arity(self, cli):
        assert cli("gen", "grid", "2") == EXIT_INPUT

    def test_gen_hardness_dimacs(self, cli, capsys):
        assert cli("--seed", "2", "gen", "hardness", "3", "2", "--dimacs") == EXIT_OK
        assert capsys.readouterr().out.startswith("p cnf 3 2\n")

    def test_gen_hardness_from_cnf(self, cli, tmp_path, capsys):
        cnf = tmp_path / "phi.cnf"
        cnf.write_text("p cnf 2 2\n1 2 0\n-1 -2 0\n")
        assert cli("gen", "hardness", "--cnf", str(cnf)) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0].split()[0] == "20"

    def test_unbreakable(self, cli, write_graph, capsys):
        assert cli("unbreakable", write_graph(complete_graph(5)), "--s", "1", "--c", "1") == EXIT_OK
        assert cli("unbreakable", write_graph(path_graph(7)), "--s", "2", "--c", "1") == EXIT_FALSE
        assert "witness:" in capsys.readouterr().out

    def test_minor(self, cli, write_graph, capsys):
        assert cli("minor", write_graph(generate_grid(3, 3)), "K4") == EXIT_OK
        assert cli("minor", write_graph(generate_grid(3, 3)), "K5") == EXIT_FALSE

    def test_harness(self, cli, capsys):
        assert cli("harness", "--count", "2", "--vars", "2", "--clauses", "1") == EXIT_OK
        assert capsys.readouterr().out.startswith("Harness Summary: total=2, passed=2")

    def test_missing_graph_file(self, cli, tmp_path, capsys):
        assert cli("pmm", "fkt", str(tmp_path / "absent.txt")) == EXIT_INPUT
        assert "cannot read" in capsys.readouterr().err


MODULATOR_X = "0,1,2,3,4,5,6,7,8"


class TestJsonSchemas:
    def test_every_command_ships_a_schema(self):
        assert schema_names() == [
            "baker-is",
            "check-modulator",
            "color",
            "find-modulator",
            "gen",
            "harness",
            "minor",
            "pmm",
            "ptd",
            "ptw-verify",
            "unbreakable",
        ]

    def test_unknown_command(self):
        with pytest.raises(InputError):
            load_schema("no-such-command")

    @pytest.mark.parametrize(
        "graph, argv, expected",
        [
            (complete_graph(5), ("check-modulator", "{graph}", "--x", "0,1,2,3", "--hclass", "edgeless"), EXIT_OK),
            (complete_graph(5), ("check-modulator", "{graph}", "--x", "0", "--hclass", "edgeless"), EXIT_FALSE),
            (complete_graph(5), ("find-modulator", "brute", "{graph}", "--hclass", "edgeless"), EXIT_OK),
            (complete_graph(6), ("find-modulator", "brute", "{graph}", "--hclass", "edgeless"), EXIT_FALSE),
            (complete_graph(5), ("ptd", "{graph}"), EXIT_OK),
            (complete_graph(5), ("ptd", "{graph}", "--k-max", "1"), EXIT_FALSE),
            (complete_graph(5), ("ptw-verify", "{graph}"), EXIT_OK),
            (generate_grid(2, 4), ("pmm", "fkt", "{graph}"), EXIT_OK),
            (
                k5_on_grid(),
                ("pmm", "hplanar", "{graph}", "--hclass", "all_graphs", "--x", MODULATOR_X, "--transcript"),
                EXIT_OK,
            ),
            (
                generate_grid(3, 3),
                ("baker-is", "{graph}", "--hclass", "edgeless", "--epsilon", "1/2", "--x", MODULATOR_X),
                EXIT_OK,
            ),
            (k5_on_grid(), ("color", "{graph}", "--hclass", "all_graphs", "--x", MODULATOR_X), EXIT_OK),
            (None, ("gen", "grid", "2", "3"), EXIT_OK),
            (None, ("gen", "hardness", "2", "1"), EXIT_OK),
            (complete_graph(5), ("unbreakable", "{graph}", "--s", "1", "--c", "1"), EXIT_OK),
            (path_graph(7), ("unbreakable", "{graph}", "--s", "2", "--c", "1"), EXIT_FALSE),
            (generate_grid(3, 3), ("minor", "{graph}", "K4"), EXIT_OK),
            (generate_grid(3, 3), ("minor", "{graph}", "K5"), EXIT_FALSE),
            (None, ("harness", "--count", "2", "--vars", "2", "--clauses", "1"), EXIT_OK),
        ],
    )
    def test_output_validates(self, cli, write_graph, capsys, graph, argv, expected):
        path = write_graph(graph) if graph is not None else ""
        args = [path if a == "{graph}" else a for a in argv]
        assert cli("--format", "json", *args) == expected
        payload = json.loads(capsys.readouterr().out)
        jsonschema.validate(instance=payload, schema=load_schema(argv[0]))

    def test_schema_rejects_drifted_output(self):
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(instance={"method": "fkt", "value": 5}, schema=load_schema("pmm"))
