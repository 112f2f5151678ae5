"""Reading and writing instances in the shared JSON format.

    {"vertices": ["a", ...],
     "arcs": [{"from": "a", "to": "b", "w": "3/2"}, ...],
     "partition": [["a", "b"], ["c"]],
     "capacities": {"a": 2}}

Extensions: "edges" ([{"u", "v", "w"}]) for undirected instances instead of
"arcs"; "labels" naming the classes; "uniform": true for unit-weight games;
a "compact_cycles" block replacing the graph entirely.

A file with "capacities" (and no partition, or a partition into singletons)
is a b-matching game on the underlying undirected graph.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Union

from .errors import ParseError, ValidationError
from .games import BMatchingGame, PartitionedGame
from .graph import DirectedGraph, Graph, Partition, underlying_undirected, validate_instance
from .hardness import CompactCycles, RedBlueGraph, expand_cycles
from .rational import fmt, to_rational

Instance = Union[PartitionedGame, BMatchingGame, CompactCycles]

_KNOWN_KEYS = {"vertices", "arcs", "edges", "partition", "labels", "capacities", "uniform", "compact_cycles"}


def _loads(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _field(data: Mapping, key: str, where: str, kind: type):
    if key not in data:
        raise ParseError(f"{where}: missing field '{key}'")
    value = data[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ParseError(f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _rational(value: Any, where: str):
    if isinstance(value, float):
        raise ParseError(f"{where}: floats are not accepted, write \"p/q\"")
    try:
        return to_rational(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: not a rational: {value!r}") from None


def _vertex(value: Any, where: str) -> str:
    if not isinstance(value, (str, int)) or isinstance(value, bool):
        raise ParseError(f"{where}: vertex ids are strings")
    return str(value)


def instance_from_json(data: Any, source: str = "<instance>") -> Instance:
    """Build and validate an instance from decoded JSON."""
    if not isinstance(data, dict):
        raise ParseError(f"{source}: top level must be an object")
    unknown = sorted(set(data) - _KNOWN_KEYS)
    if unknown:
        raise ParseError(f"{source}: unknown field '{unknown[0]}'")

    if "compact_cycles" in data:
        block = _field(data, "compact_cycles", source, list)
        cycles = []
        for i, entry in enumerate(block):
            where = f"{source}.compact_cycles[{i}]"
            if not isinstance(entry, dict):
                raise ParseError(f"{where}: expected object")
            a = _field(entry, "a", where, int)
            if a < 1:
                raise ParseError(f"{where}.a: must be a positive integer")
            L = _rational(entry.get("L"), f"{where}.L")
            if L <= 0:
                raise ValidationError([f"cycle {i + 1} has nonpositive L"])
            cycles.append((a, L))
        return CompactCycles(tuple(cycles))

    vertices = [_vertex(v, f"{source}.vertices[{i}]") for i, v in enumerate(_field(data, "vertices", source, list))]
    if ("arcs" in data) == ("edges" in data):
        raise ParseError(f"{source}: give exactly one of 'arcs' or 'edges'")
    directed = "arcs" in data
    key, ends = ("arcs", ("from", "to")) if directed else ("edges", ("u", "v"))
    items = []
    for i, entry in enumerate(_field(data, key, source, list)):
        where = f"{source}.{key}[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected object")
        u = _vertex(entry.get(ends[0]), f"{where}.{ends[0]}")
        v = _vertex(entry.get(ends[1]), f"{where}.{ends[1]}")
        if "w" not in entry:
            raise ParseError(f"{where}: missing field 'w'")
        items.append((u, v, _rational(entry["w"], f"{where}.w")))
    graph = DirectedGraph(vertices, items) if directed else Graph(vertices, items)

    partition = None
    if "partition" in data:
        classes = []
        for i, cls in enumerate(_field(data, "partition", source, list)):
            if not isinstance(cls, list):
                raise ParseError(f"{source}.partition[{i}]: expected list")
            classes.append([_vertex(v, f"{source}.partition[{i}][{j}]") for j, v in enumerate(cls)])
        labels = None
        if "labels" in data:
            labels = [str(x) for x in _field(data, "labels", source, list)]
            if len(labels) != len(classes) or len(set(labels)) != len(labels):
                raise ParseError(f"{source}.labels: need one distinct label per class")
        partition = Partition(classes, labels)

    capacities = None
    if "capacities" in data:
        capacities = {}
        for v, b in _field(data, "capacities", source, dict).items():
            if not isinstance(b, int) or isinstance(b, bool):
                raise ParseError(f"{source}.capacities.{v}: expected integer")
            capacities[str(v)] = b

    problems = validate_instance(graph, partition, capacities)
    if capacities is not None and partition is not None and partition.width > 1:
        problems.append("capacities need a partition into singletons (or none)")
    if capacities is None and partition is None:
        problems.append("missing partition")
    if problems:
        raise ValidationError(problems)

    uniform = data.get("uniform", False)
    if not isinstance(uniform, bool):
        raise ParseError(f"{source}.uniform: expected boolean")
    if capacities is not None:
        undirected = underlying_undirected(graph) if directed else graph
        return BMatchingGame(undirected, capacities)
    return PartitionedGame(graph, partition, uniform=uniform)


def parse_instance(path: Union[str, Path]) -> Instance:
    """Parse a file; compact instances come back unexpanded."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return instance_from_json(_loads(text, str(path)), str(path))


def as_game(instance: Instance) -> Union[PartitionedGame, BMatchingGame]:
    if isinstance(instance, CompactCycles):
        return expand_cycles(instance)
    return instance


def load_game(path: Union[str, Path]) -> Union[PartitionedGame, BMatchingGame]:
    return as_game(parse_instance(path))


def instance_to_json(instance: Instance) -> dict:
    """Inverse of :func:`instance_from_json`."""
    if isinstance(instance, CompactCycles):
        return instance.to_json()
    if isinstance(instance, BMatchingGame):
        g = instance.graph
        return {
            "vertices": list(g.vertices),
            "edges": [{"u": u, "v": v, "w": fmt(w)} for u, v, w in g.edges],
            "capacities": {v: instance.capacities[v] for v in g.vertices},
        }
    g = instance.graph
    out: dict[str, Any] = {"vertices": list(g.vertices)}
    if instance.directed:
        out["arcs"] = [{"from": u, "to": v, "w": fmt(w)} for u, v, w in g.arcs]
    else:
        out["edges"] = [{"u": u, "v": v, "w": fmt(w)} for u, v, w in g.edges]
    out["partition"] = [list(c) for c in instance.partition.classes]
    if list(instance.partition.labels) != [str(i) for i in range(1, instance.n + 1)]:
        out["labels"] = list(instance.partition.labels)
    if instance.uniform:
        out["uniform"] = True
    return out


def dumps(data: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_instance(instance: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(instance_to_json(instance)), encoding="utf-8")


def load_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return _loads(text, str(path))


def parse_red_blue(path: Union[str, Path]) -> RedBlueGraph:
    data = load_json(path)
    try:
        return RedBlueGraph.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed red-blue graph ({exc})") from None
