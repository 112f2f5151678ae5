"""Command-line front end.

Exit status: 0 on success, 1 when the answer is negative (empty core, no
matching, not in the core, ...), 2 on errors. Results are JSON on stdout;
every number is a canonical rational string.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import core, hardness, reductions, simulator
from .errors import PMGamesError
from .games import BMatchingGame, PartitionedGame, allocation_from_json, allocation_to_json, received
from .graph import Graph
from .instances import as_game, dumps, instance_from_json, instance_to_json, load_json, parse_instance, parse_red_blue
from .lexmin import LevelStructure, deviation_vector, lexmin_bruteforce, lexmin_uniform, lexmin_width1_directed
from .matching import max_weight_matching
from .rational import fmt


class Result:
    def __init__(self, body: dict, status: int = 0):
        self.body = body
        self.status = status


def _edges(m) -> list[list[str]]:
    return [list(e) for e in sorted(m)]


def _values(d) -> dict[str, str]:
    return {p: fmt(v) for p, v in d.items()}


def _exact(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact number: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None


def _partitioned(path: str) -> PartitionedGame:
    game = as_game(parse_instance(path))
    if not isinstance(game, PartitionedGame):
        raise PMGamesError(f"{path}: expected a partitioned game, got a b-matching game")
    return game


def _bgame(path: str) -> BMatchingGame:
    game = as_game(parse_instance(path))
    if not isinstance(game, BMatchingGame):
        raise PMGamesError(f"{path}: expected a b-matching game (with capacities)")
    return game


def _read_graph(path: str) -> Graph:
    """Undirected graph from an instance or red-blue file; everything but the graph is ignored."""
    data = load_json(path)
    if isinstance(data, dict):
        edges = data.get("edges")
        if isinstance(edges, list) and edges and isinstance(edges[0], dict) and "from" in edges[0]:
            return parse_red_blue(path).graph
        data = {k: v for k, v in data.items() if k in ("vertices", "arcs", "edges")}
        data["capacities"] = {}
    return instance_from_json(data, path).graph


# -- commands -------------------------------------------------------------------

def cmd_solve(args) -> Result:
    game = as_game(parse_instance(args.file))
    if isinstance(game, BMatchingGame):
        exp = reductions.tutte_expansion(game)
        m, _ = max_weight_matching(exp.result.undirected, exp.result.weights)
        return Result({"value": fmt(game.grand_value()), "players": game.n, "expansion_matching": _edges(m)})
    m, _ = max_weight_matching(game.undirected, game.weights)
    key = "s" if game.uniform else "u"
    return Result({"value": fmt(game.grand_value()), "players": game.n, "matching": _edges(m), key: _values(received(game, m))})


def _level_structure(game: PartitionedGame, m, x) -> LevelStructure:
    r = received(game, m)
    dev = {p: abs(x[p] - r[p]) for p in game.players}
    levels = sorted(set(dev.values()), reverse=True)
    return LevelStructure(tuple(levels), tuple(tuple(p for p in game.players if dev[p] == d) for d in levels))


def cmd_lexmin(args) -> Result:
    game = _partitioned(args.file)
    x = allocation_from_json(load_json(args.target))
    mode = args.mode or ("uniform" if game.uniform else "directed")
    game = PartitionedGame(game.graph, game.partition, uniform=mode == "uniform")
    if mode == "uniform":
        res = lexmin_uniform(game, x)
        m, levels = res.matching, res.levels
    else:
        if game.partition.width <= 1:
            m = lexmin_width1_directed(game, x)
        else:
            m = lexmin_bruteforce(game, x, args.bound)[0]
        levels = _level_structure(game, m, x)
    body = {
        "mode": mode,
        "matching": _edges(m),
        "s" if mode == "uniform" else "u": _values(received(game, m)),
        "deviation": [fmt(d) for d in deviation_vector(game, m, x)],
        "levels": [{"deviation": fmt(d), "players": list(c)} for d, c in zip(levels.levels, levels.classes)],
    }
    return Result(body)


def cmd_core_check(args) -> Result:
    game = as_game(parse_instance(args.file))
    x = allocation_from_json(load_json(args.alloc))
    block = core.check_core_membership(game, x, bound=args.bound)
    if block is None:
        return Result({"in_core": True})
    return Result({"in_core": False, "blocking": block.to_json()}, 1)


def cmd_core_find(args) -> Result:
    game = as_game(parse_instance(args.file))
    x = core.find_core_allocation(game, bound=args.bound)
    if x is None:
        return Result({"core": "empty"}, 1)
    return Result({"core": "nonempty", "allocation": allocation_to_json(x)["values"]})


def cmd_core_cert(args) -> Result:
    game = as_game(parse_instance(args.file))
    if args.lam is None:
        lam = core.find_balanced_certificate(game, bound=args.bound)
        if lam is None:
            return Result({"certificate": "none"}, 1)
        check = core.verify_balanced_certificate(game, lam)
        body = core.certificate_to_json(lam, game.players)
    else:
        check = core.verify_balanced_certificate(game, core.certificate_from_json(load_json(args.lam)))
        body = {}
    body.update(
        certifies_empty=check.certifies_empty,
        weighted_value=fmt(check.weighted_value),
        grand_value=fmt(check.grand_value),
    )
    return Result(body, 0 if check.certifies_empty else 1)


def _emit_reduction(args, instance, player_map: dict) -> Result:
    data = instance_to_json(instance)
    if args.out:
        out = Path(args.out)
        out.write_text(dumps(data), encoding="utf-8")
        sidecar = out.with_suffix(".map.json")
        sidecar.write_text(dumps(player_map), encoding="utf-8")
        return Result({"instance": str(out), "player_map": str(sidecar)})
    return Result({"instance": data, "player_map": player_map})


def cmd_reduce_b2p(args) -> Result:
    exp = reductions.tutte_expansion(_bgame(args.file))
    pmap = {label: {"vertex": v} for v, label in exp.vertex_class.items()}
    pmap.update({label: {"edge": list(e)} for e, label in exp.edge_class.items()})
    return _emit_reduction(args, exp.result, pmap)


def cmd_reduce_p2b(args) -> Result:
    gadget = reductions.root_gadget(_partitioned(args.file))
    src = gadget.source
    pmap = {p: {"root": gadget.root_of[p], "vertices": list(src.partition.members(p))} for p in src.players}
    return _emit_reduction(args, gadget.result, pmap)


def _generated(gen: hardness.GeneratedInstance, expected: dict) -> Result:
    body = {"instance": instance_to_json(gen.game), "target": _values(gen.target), "expected": expected}
    return Result(body)


def cmd_gen_partition(args) -> Result:
    gen = hardness.gen_partition_instance(args.a)
    return _generated(gen, {"even_split": hardness.has_even_split(args.a)})


def cmd_gen_3partition(args) -> Result:
    gen = hardness.gen_3partition_instance(args.a, args.c, args.L)
    return _generated(gen, {"three_partition": hardness.has_3partition(args.a, args.c)})


def cmd_gen_cycles(args) -> Result:
    gen = hardness.gen_compact_cycle_instance(args.a, args.L, normalize=args.normalize)
    return _generated(gen, {"even_split": hardness.has_even_split(gen.meta["a"])})


def cmd_gen_nearly3regular(args) -> Result:
    g = _read_graph(args.file)
    game = hardness.gen_nearly3regular_bgame(g)
    sub = hardness.find_nearly3regular_subgraph(g, max_edges=args.max_edges) if len(g.edges) <= args.max_edges else None
    expected = {"nearly3regular_subgraph": None if sub is None else _edges(sub)}
    if len(g.edges) > args.max_edges:
        expected = {"nearly3regular_subgraph": "not searched"}
    body = {
        "instance": instance_to_json(game),
        "allocation": _values(hardness.nearly3regular_allocation(g)),
        "expected": expected,
    }
    return Result(body)


def cmd_gen_epm(args) -> Result:
    rb = hardness.gen_epm_instance(args.n, args.red_density, args.k, args.seed)
    body = rb.to_json()
    if args.n <= hardness.EPM_BOUND:
        m = hardness.brute_force_epm(rb)
        body["expected"] = {"answer": "none"} if m is None else {"answer": "found", "matching": _edges(m)}
    return Result(body)


def cmd_simulate(args) -> Result:
    data = load_json(args.config)
    if not isinstance(data, dict):
        raise PMGamesError(f"{args.config}: config must be an object")
    if args.seed is not None:
        data["seed"] = args.seed
    if args.rounds is not None:
        data["rounds"] = args.rounds
    cfg = simulator.SimConfig.from_json(data)
    traces = simulator.run_simulation(cfg)
    simulator.emit_trace(traces, args.out, args.format, seed=cfg.seed)
    return Result({"out": args.out, "rounds": len(traces), "seed": cfg.seed, "format": args.format})


def cmd_epm(args) -> Result:
    rb = parse_red_blue(args.file)
    if args.via_game:
        m = hardness.solve_epm_via_game(rb, args.k)
    else:
        m = hardness.brute_force_epm(rb, args.k)
    if m is None:
        return Result({"answer": "none"}, 1)
    red = sum(1 for e in m if e in rb.red)
    return Result({"answer": "found", "matching": _edges(m), "red": red})


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pmgames", description="Partitioned matching games toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="v(N) and an optimal matching")
    p.add_argument("file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("lexmin", help="lexicographically minimal maximum-weight matching")
    p.add_argument("file")
    p.add_argument("--target", required=True, help='allocation JSON {"values": {...}}')
    p.add_argument("--mode", choices=("uniform", "directed"))
    p.add_argument("--bound", type=int, default=16, help="vertex bound for enumeration")
    p.set_defaults(func=cmd_lexmin)

    p = sub.add_parser("core", help="core membership, core point, certificates")
    csub = p.add_subparsers(dest="core_command", required=True)
    q = csub.add_parser("check")
    q.add_argument("file")
    q.add_argument("--alloc", required=True)
    q.add_argument("--bound", type=int, default=core.MEMBERSHIP_BOUND)
    q.set_defaults(func=cmd_core_check)
    q = csub.add_parser("find")
    q.add_argument("file")
    q.add_argument("--bound", type=int, default=core.FIND_BOUND)
    q.set_defaults(func=cmd_core_find)
    q = csub.add_parser("cert")
    q.add_argument("file")
    q.add_argument("--lambda", dest="lam", help="certificate to verify; searched for when omitted")
    q.add_argument("--bound", type=int, default=12)
    q.set_defaults(func=cmd_core_cert)

    p = sub.add_parser("reduce", help="b-matching <-> partitioned game reductions")
    rsub = p.add_subparsers(dest="reduce_command", required=True)
    for name, func in (("b2p", cmd_reduce_b2p), ("p2b", cmd_reduce_p2b)):
        q = rsub.add_parser(name)
        q.add_argument("file")
        q.add_argument("--out", help="write the instance here and the player map next to it")
        q.set_defaults(func=func)

    p = sub.add_parser("gen", help="hardness gadget generators")
    gsub = p.add_subparsers(dest="gen_command", required=True)
    q = gsub.add_parser("partition")
    q.add_argument("--a", type=_int_list, required=True)
    q.set_defaults(func=cmd_gen_partition)
    q = gsub.add_parser("3partition")
    q.add_argument("--a", type=_int_list, required=True)
    q.add_argument("--c", type=int, required=True)
    q.add_argument("--L", type=int)
    q.set_defaults(func=cmd_gen_3partition)
    q = gsub.add_parser("cycles")
    q.add_argument("--a", type=_int_list, required=True)
    q.add_argument("--L", type=_exact)
    q.add_argument("--normalize", action="store_true")
    q.set_defaults(func=cmd_gen_cycles)
    q = gsub.add_parser("nearly3regular")
    q.add_argument("file")
    q.add_argument("--max-edges", type=int, default=24)
    q.set_defaults(func=cmd_gen_nearly3regular)
    q = gsub.add_parser("epm")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--red-density", type=_exact, required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.set_defaults(func=cmd_gen_epm)

    p = sub.add_parser("simulate", help="multi-round credit simulation")
    p.add_argument("config")
    p.add_argument("--seed", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("epm", help="exact perfect matching with k red edges")
    p.add_argument("file")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--via-game", action="store_true")
    p.set_defaults(func=cmd_epm)
    return ap


def dispatch(args: argparse.Namespace) -> Result:
    try:
        return args.func(args)
    except PMGamesError as exc:
        return Result({"error": type(exc).__name__, "message": str(exc)}, 2)
    except (ValueError, TypeError, KeyError, OSError) as exc:
        return Result({"error": type(exc).__name__, "message": str(exc)}, 2)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    res = dispatch(args)
    sys.stdout.write(dumps(res.body))
    if res.status == 2:
        print(f"error: {res.body['message']}", file=sys.stderr)
    return res.status


if __name__ == "__main__":
    sys.exit(main())
