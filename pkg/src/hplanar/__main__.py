"""Entry point for the hplanar toolkit."""

import argparse
import json
import logging
import os
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any, Optional

from dotenv import load_dotenv

from . import __version__
from .approx import baker_independent_set, baker_independent_set_ptw
from .coloring import CertifiedColoring, additive_color, ptd_color, ptw_color
from .config import Config, parse_ceiling
from .decomposition import (
    EliminationSequence,
    PlanarWidthDecomposition,
    planar_treedepth_exact,
    planar_treewidth_exact,
    verify_elimination_sequence,
    verify_planar_width,
)
from .errors import CeilingExceeded, ContractViolation, HPlanarError, InputError, OracleFault
from .exact import pmm_bruteforce
from .fkt import fkt_pmm
from .generators import generate_apex_grid, generate_grid, generate_wall
from .graph import Graph, VertexSet, complete_graph
from .graph_io import format_graph_text, format_vertex_list, graph_to_json, parse_graph, parse_vertex_list
from .hardness import PlanarCnf, format_dimacs, parse_dimacs, random_planar_cnf, reduce
from .harness import HarnessRunner
from .hclasses import BUILTIN_NAMES, HClass, resolve_hclass
from .logging_config import setup_logging
from .matching import pmm_by_blocks, run_hplanar_pmm
from .minors import find_minor
from .modulator import (
    PlanarModulator,
    TargetClass,
    big_leaf_GH_search,
    big_leaf_search,
    brute_force_planar_modulator,
    has_planar_modulator,
    self_reduce_elimination_sequence,
    self_reduce_modulator,
    verify_planar_modulator,
)
from .planarity import RotationSystem
from .separations import is_unbreakable

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_CEILING = 3

CEILING_FLAGS = (
    "subset_ceiling",
    "minor_ceiling",
    "modulator_ceiling",
    "ptd_ceiling",
    "pmm_ceiling",
    "color_ceiling",
    "sat_ceiling",
    "forbidden_ceiling",
    "harness_ceiling",
)


# --- input helpers -------------------------------------------------------------


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _load_graph(path: str) -> tuple[Graph, Optional[RotationSystem]]:
    return parse_graph(_read_text(path))


def _load_json(path: str) -> Any:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from None


def _load_pattern(name: str) -> Graph:
    """A graph file, or K<n> for a complete graph."""
    if name[:1] in ("K", "k") and name[1:].isdigit():
        return complete_graph(int(name[1:]))
    return _load_graph(name)[0]


def _hclass(args: argparse.Namespace) -> HClass:
    return resolve_hclass(args.hclass, args.hsize)


def _modulator_from_args(args: argparse.Namespace, g: Graph, h: HClass, config: Config) -> Optional[VertexSet]:
    """The --x list when given, otherwise the smallest modulator found by brute force."""
    if args.x is not None:
        return parse_vertex_list(args.x, g.n)
    found = brute_force_planar_modulator(g, h, ceiling=config.modulator_ceiling)
    return None if found is None else found.x


def _emit(args: argparse.Namespace, lines: list[str], payload: dict[str, Any]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _emit_graph(args: argparse.Namespace, g: Graph) -> None:
    if args.format == "json":
        print(json.dumps(graph_to_json(g), sort_keys=True))
    else:
        sys.stdout.write(format_graph_text(g))


def _modulator_lines(mod: PlanarModulator) -> list[str]:
    lines = [f"modulator: {format_vertex_list(mod.x)}", f"size: {len(mod.x)}"]
    for cert in mod.component_certificates:
        lines.append(
            f"component {format_vertex_list(cert.component)} "
            f"attached at {format_vertex_list(cert.neighborhood)}"
        )
    return lines


# --- commands ------------------------------------------------------------------


def cmd_check_modulator(args: argparse.Namespace, config: Config) -> int:
    g, _ = _load_graph(args.graph)
    h = _hclass(args)
    x = parse_vertex_list(args.x, g.n)
    report = verify_planar_modulator(g, h, x)
    payload: dict[str, Any] = {"ok": report.ok, "reason": report.reason}
    if report.modulator is not None:
        payload["modulator"] = report.modulator.to_json()
    if report.witness is not None:
        payload["witness"] = {"kind": report.witness.kind, "edges": [list(e) for e in report.witness.edges]}
    if report.failing_component is not None:
        payload["failing_component"] = sorted(report.failing_component)
    lines = ["valid" if report else f"invalid: {report.reason}"]
    _emit(args, lines, payload)
    return EXIT_OK if report else EXIT_FALSE


def cmd_find_modulator(args: argparse.Namespace, config: Config) -> int:
    g, _ = _load_graph(args.graph)
    h = _hclass(args)
    if args.method == "brute":
        found = brute_force_planar_modulator(g, h, ceiling=config.modulator_ceiling)
    elif args.method == "bigleaf":
        if args.a is None:
            raise InputError("bigleaf needs --a")
        if args.target is not None:
            gh = big_leaf_GH_search(
                g, h, TargetClass.parse(args.target), args.a, seed=config.seed, ceiling=config.subset_ceiling
            )
            if gh is None:
                _emit(args, ["absent"], {"found": False})
                return EXIT_FALSE
            _emit(
                args,
                [f"modulator: {format_vertex_list(gh.x)}", f"target: {gh.target}"],
                {"found": True, "modulator": gh.to_json()},
            )
            return EXIT_OK
        found = big_leaf_search(g, h, args.a, ceiling=config.subset_ceiling)
    else:
        ceiling = config.modulator_ceiling
        if not has_planar_modulator(g, h, ceiling=ceiling):
            found = None
        else:
            found = self_reduce_modulator(g, h, decide=lambda graph: has_planar_modulator(graph, h, ceiling=None))
    if found is None:
        _emit(args, ["absent"], {"found": False})
        return EXIT_FALSE
    _emit(args, _modulator_lines(found), {"found": True, "modulator": found.to_json()})
    return EXIT_OK


def cmd_ptd(args: argparse.Namespace, config: Config) -> int:
    g, _ = _load_graph(args.graph)
    h = _hclass(args) if args.hclass else None
    if args.verify is not None:
        seq = EliminationSequence.from_json(_load_json(args.verify))
        report = verify_elimination_sequence(g, h, seq)
        _emit(
            args,
            [f"valid, depth {seq.depth}" if report else f"invalid: {report.reason}"],
            {"ok": report.ok, "reason": report.reason, "depth": seq.depth},
        )
        return EXIT_OK if report else EXIT_FALSE
    if args.self_reduce is not None:
        if h is None:
            raise InputError("--self-reduce needs --hclass")
        seq = self_reduce_elimination_sequence(
            g,
            h,
            args.self_reduce,
            decide=lambda graph, depth: planar_treedepth_exact(
                graph, h, k_max=depth, ceiling=config.ptd_ceiling
            ).value is not None,
        )
        lines = [f"depth: {seq.depth}"] + [f"layer {i}: {format_vertex_list(layer)}" for i, layer in enumerate(seq.layers)]
        _emit(args, lines, {"sequence": seq.to_json()})
        return EXIT_OK
    result = planar_treedepth_exact(g, h, k_max=args.k_max, ceiling=config.ptd_ceiling)
    if result.value is None:
        _emit(args, [f"above {args.k_max}"], {"value": None})
        return EXIT_FALSE
    lines = [f"ptd: {result.value}"]
    payload: dict[str, Any] = {"value": result.value}
    if result.sequence is not None:
        lines += [f"layer {i}: {format_vertex_list(layer)}" for i, layer in enumerate(result.sequence.layers)]
        payload["sequence"] = result.sequence.to_json()
    _emit(args, lines, payload)
    return EXIT_OK


def cmd_ptw_verify(args: argparse.Namespace, config: Config) -> int:
    g, _ = _load_graph(args.graph)
    h = _hclass(args) if args.hclass else None
    if args.certificate is None:
        value, pw = planar_treewidth_exact(g, ceiling=config.ptd_ceiling)
        _emit(args, [f"ptw: {value}"], {"value": value, "decomposition": pw.to_json()})
        return EXIT_OK
    if args.k is None:
        raise InputError("verifying a certificate needs --k")
    pw = PlanarWidthDecomposition.from_json(_load_json(args.certificate))
    report = verify_planar_width(g, pw, args.k, h)
    _emit(
        args,
        ["valid" if report else f"invalid: {report.reason}"],
        {"ok": report.ok, "reason": report.reason},
    )
    return EXIT_OK if report else EXIT_FALSE


def cmd_pmm(args: argparse.Namespace, config: Config) -> int:
    g, _ = _load_graph(args.graph)
    payload: dict[str, Any] = {"method": args.method}
    if args.method == "brute":
        value = pmm_bruteforce(g, ceiling=config.pmm_ceiling)
    elif args.method == "fkt":
        value = fkt_pmm(g)
    elif args.method == "blocks":
        value = pmm_by_blocks(g, _hclass(args) if args.hclass else None, ceiling=config.pmm_ceiling)
    else:
        if not args.hclass:
            raise InputError("pmm hplanar needs --hclass")
        h = _hclass(args)
        x = _modulator_from_args(args, g, h, config)
        if x is None:
            raise InputError(f"graph has no planar {h.name}-modulator")
        run = run_hplanar_pmm(g, h, x, instrument=args.transcript, ceiling=config.pmm_ceiling)
        value = run.value
        if args.transcript:
            payload["transcript"] = run.to_json()
    payload["value"] = str(value)
    _emit(args, [str(value)], payload)
    return EXIT_OK


def cmd_baker_is(args: argparse.Namespace, config: Config) -> int:
    g, _ = _load_graph(args.graph)
    h = _hclass(args)
    if args.experimental:
        if args.decomposition is None or args.width is None:
            raise InputError("--experimental needs --decomposition and --width")
        pw = PlanarWidthDecomposition.from_json(_load_json(args.decomposition))
        run = baker_independent_set_ptw(g, h, pw, args.width, args.epsilon, ceiling=config.ptd_ceiling)
    else:
        x = _modulator_from_args(args, g, h, config)
        if x is None:
            raise InputError(f"graph has no planar {h.name}-modulator")
        run = baker_independent_set(g, h, x, args.epsilon)
    lines = [f"size: {len(run.result)}", f"set: {format_vertex_list(run.result)}", f"k: {run.k}"]
    _emit(args, lines, run.to_json())
    return EXIT_OK


def cmd_color(args: argparse.Namespace, config: Config) -> int:
    g, _ = _load_graph(args.graph)
    h = _hclass(args)
    result: CertifiedColoring
    if args.sequence is not None:
        seq = EliminationSequence.from_json(_load_json(args.sequence))
        result = ptd_color(g, h, seq, ceiling=config.color_ceiling)
    elif args.decomposition is not None:
        if args.width is None:
            raise InputError("--decomposition needs --width")
        pw = PlanarWidthDecomposition.from_json(_load_json(args.decomposition))
        result = ptw_color(g, h, pw, args.width, ceiling=config.color_ceiling)
    else:
        x = _modulator_from_args(args, g, h, config)
        if x is None:
            raise InputError(f"graph has no planar {h.name}-modulator")
        result = additive_color(g, h, x, ceiling=config.color_ceiling)
    lines = [
        f"colors: {result.coloring.color_count}",
        f"bound: chi + {result.additive} (palette {result.palette})",
        "assignment: " + " ".join(str(c) for c in result.coloring.colors),
    ]
    _emit(args, lines, result.to_json())
    return EXIT_OK


def cmd_gen(args: argparse.Namespace, config: Config) -> int:
    values = args.params
    if args.kind == "grid":
        if len(values) != 2:
            raise InputError("gen grid needs K R")
        _emit_graph(args, generate_grid(values[0], values[1]))
    elif args.kind == "wall":
        if len(values) != 1:
            raise InputError("gen wall needs R")
        _emit_graph(args, generate_wall(values[0]))
    elif args.kind == "apex":
        if len(values) != 1:
            raise InputError("gen apex needs K")
        _emit_graph(args, generate_apex_grid(values[0]))
    else:
        phi: PlanarCnf
        if args.cnf is not None:
            phi = parse_dimacs(_read_text(args.cnf))
        else:
            if len(values) != 2:
                raise InputError("gen hardness needs VARIABLES CLAUSES or --cnf")
            phi = random_planar_cnf(values[0], values[1], seed=config.seed)
        if args.dimacs:
            sys.stdout.write(format_dimacs(phi))
        else:
            _emit_graph(args, reduce(phi).graph)
    return EXIT_OK


def cmd_unbreakable(args: argparse.Namespace, config: Config) -> int:
    g, _ = _load_graph(args.graph)
    report = is_unbreakable(g, args.s, args.c, ceiling=config.subset_ceiling)
    if report:
        _emit(args, ["unbreakable"], {"unbreakable": True})
        return EXIT_OK
    assert report.witness is not None
    left, right = report.witness.left, report.witness.right
    _emit(
        args,
        [f"witness: {format_vertex_list(left)} | {format_vertex_list(right)}"],
        {"unbreakable": False, "left": sorted(left), "right": sorted(right)},
    )
    return EXIT_FALSE


def cmd_minor(args: argparse.Namespace, config: Config) -> int:
    host, _ = _load_graph(args.host)
    pattern = _load_pattern(args.pattern)
    model = find_minor(host, pattern, ceiling=config.minor_ceiling)
    if model is None:
        _emit(args, ["absent"], {"found": False})
        return EXIT_FALSE
    branch = {str(k): sorted(v) for k, v in sorted(model.branch_sets.items())}
    lines = [f"{k}: {format_vertex_list(frozenset(v))}" for k, v in branch.items()]
    _emit(args, lines, {"found": True, "branch_sets": branch})
    return EXIT_OK


def cmd_harness(args: argparse.Namespace, config: Config) -> int:
    runner = HarnessRunner(config)
    try:
        summary = runner.run(args.count, args.vars, args.clauses)
    finally:
        runner.close()
    _emit(
        args,
        [str(summary)],
        {
            "total": summary.total,
            "passed": summary.passed,
            "failed": summary.failed,
            "breaches": summary.breaches,
            "ceilings": summary.ceilings,
            "unsatisfiable": summary.unsatisfiable,
            "failing_seeds": summary.failing_seeds,
        },
    )
    return EXIT_OK if summary.ok else EXIT_FALSE


# --- parser --------------------------------------------------------------------


def _add_hclass(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument(
        "--hclass",
        required=required,
        choices=BUILTIN_NAMES,
        help="Target class of the leaf components",
    )
    parser.add_argument("--hsize", type=int, default=None, help="Restrict the class to at most this many vertices")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hplanar", description="H-planarity toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--env-file", default=".env", help="Path to .env file (default: .env)")
    parser.add_argument(
        "--log-level",
        default=os.getenv("LOG_LEVEL", "WARNING"),
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Log level (default: WARNING)",
    )
    parser.add_argument(
        "--log-format",
        default=os.getenv("LOG_FORMAT", "text"),
        choices=["text", "json", "kv"],
        help="Log format (default: text)",
    )
    parser.add_argument("--format", choices=["text", "json"], default=None, help="Output format")
    parser.add_argument("--seed", type=int, default=None, help="Seed for randomized commands")
    parser.add_argument("--threads", type=int, default=None, help="Worker process cap")
    for name in CEILING_FLAGS:
        parser.add_argument(
            f"--{name.replace('_', '-')}",
            dest=name,
            default=None,
            help="Size ceiling; 'none' disables it",
        )

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-modulator", help="Verify a planar H-modulator")
    p.add_argument("graph")
    p.add_argument("--x", required=True, help="Modulator as 0,3,5 or @file")
    _add_hclass(p)
    p.set_defaults(handler=cmd_check_modulator)

    p = sub.add_parser("find-modulator", help="Search for a planar H-modulator")
    p.add_argument("method", choices=["brute", "bigleaf", "selfreduce"])
    p.add_argument("graph")
    _add_hclass(p)
    p.add_argument("--a", type=int, default=None, help="Unbreakability threshold for bigleaf")
    p.add_argument("--target", default=None, help="Torso class for bigleaf, e.g. ptd:2")
    p.set_defaults(handler=cmd_find_modulator)

    p = sub.add_parser("ptd", help="H-planar treedepth with certificate")
    p.add_argument("graph")
    _add_hclass(p, required=False)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--verify", default=None, help="Elimination sequence JSON to verify")
    p.add_argument("--self-reduce", type=int, default=None, metavar="K")
    p.set_defaults(handler=cmd_ptd)

    p = sub.add_parser("ptw-verify", help="Verify (or compute) a planar-width decomposition")
    p.add_argument("graph")
    p.add_argument("certificate", nargs="?", default=None)
    p.add_argument("--k", type=int, default=None)
    _add_hclass(p, required=False)
    p.set_defaults(handler=cmd_ptw_verify)

    p = sub.add_parser("pmm", help="Weighted perfect matching count")
    p.add_argument("method", choices=["brute", "fkt", "hplanar", "blocks"])
    p.add_argument("graph")
    _add_hclass(p, required=False)
    p.add_argument("--x", default=None, help="Modulator as 0,3,5 or @file")
    p.add_argument("--transcript", action="store_true", help="Include the substitution transcript")
    p.set_defaults(handler=cmd_pmm)

    p = sub.add_parser("baker-is", help="(1-eps)-approximate maximum independent set")
    p.add_argument("graph")
    _add_hclass(p)
    p.add_argument("--epsilon", required=True, help="Rational in (0, 1), e.g. 1/3")
    p.add_argument("--x", default=None)
    p.add_argument("--experimental", action="store_true", help="Use a planar-width decomposition")
    p.add_argument("--decomposition", default=None)
    p.add_argument("--width", type=int, default=None)
    p.set_defaults(handler=cmd_baker_is)

    p = sub.add_parser("color", help="Coloring with certified additive error")
    p.add_argument("graph")
    _add_hclass(p)
    p.add_argument("--x", default=None)
    p.add_argument("--sequence", default=None, help="Elimination sequence JSON")
    p.add_argument("--decomposition", default=None, help="Planar-width decomposition JSON")
    p.add_argument("--width", type=int, default=None)
    p.set_defaults(handler=cmd_color)

    p = sub.add_parser("gen", help="Generate instances")
    p.add_argument("kind", choices=["grid", "wall", "apex", "hardness"])
    p.add_argument("params", type=int, nargs="*")
    p.add_argument("--cnf", default=None, help="DIMACS formula for gen hardness")
    p.add_argument("--dimacs", action="store_true", help="Print the formula instead of the graph")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("unbreakable", help="(s, c)-unbreakability check")
    p.add_argument("graph")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.set_defaults(handler=cmd_unbreakable)

    p = sub.add_parser("minor", help="Brute-force minor model search")
    p.add_argument("host")
    p.add_argument("pattern", help="Graph file or K<n>")
    p.set_defaults(handler=cmd_minor)

    p = sub.add_parser("harness", help="Seeded batch of the hardness equivalence check")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--vars", type=int, default=3)
    p.add_argument("--clauses", type=int, default=2)
    p.set_defaults(handler=cmd_harness)

    return parser


def apply_overrides(config: Config, args: argparse.Namespace) -> Config:
    if args.seed is not None:
        config.seed = args.seed
    if args.threads is not None:
        config.threads = max(1, args.threads)
    if args.format is not None:
        config.output_format = args.format
    for name in CEILING_FLAGS:
        raw = getattr(args, name)
        if raw is not None:
            try:
                setattr(config, name, parse_ceiling(raw))
            except ValueError:
                raise InputError(f"--{name.replace('_', '-')}: {raw!r} is not a number or 'none'") from None
    return config


def run(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if os.path.exists(args.env_file):
        load_dotenv(args.env_file)

    setup_logging(level=args.log_level, format_type=args.log_format)

    handler: Callable[[argparse.Namespace, Config], int] = args.handler
    try:
        config = apply_overrides(Config.from_env(), args)
        args.format = config.output_format
        code = handler(args, config)
        logger.info(f"{args.command} finished with exit code {code}", extra={"command": args.command})
        return code
    except CeilingExceeded as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CEILING
    except (ContractViolation, OracleFault) as e:
        logger.error(f"{args.command}: internal check failed: {e}", extra={"command": args.command})
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FALSE
    except (HPlanarError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    try:
        sys.exit(run())
    except KeyboardInterrupt:
        print("\nInterrupted", file=sys.stderr)
        sys.exit(130)


if __name__ == "__main__":
    main()
