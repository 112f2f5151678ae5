"""Exact-rational compatibility graphs, partitions and instance validation.

Vertex identifiers are opaque strings. Their order in ``vertices`` is the
canonical order used for every tie-break in the package.

Constructors do not reject malformed input; :func:`validate_instance` is the
gate, and the JSON loader refuses anything it reports.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import UnknownVertex
from .rational import RationalLike, to_rational

Edge = tuple[str, str]


@dataclass(frozen=True)
class DirectedGraph:
    """Directed compatibility graph: arc (i, j) means donor of i fits patient of j."""

    vertices: tuple[str, ...]
    arcs: tuple[tuple[str, str, Fraction], ...] = ()

    def __init__(self, vertices: Iterable[str], arcs: Iterable[tuple[str, str, RationalLike]] = ()):
        object.__setattr__(self, "vertices", tuple(str(v) for v in vertices))
        object.__setattr__(
            self, "arcs", tuple((str(u), str(v), to_rational(w)) for u, v, w in arcs)
        )

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _weights(self) -> dict[tuple[str, str], Fraction]:
        return {(u, v): w for u, v, w in self.arcs}

    def weight(self, u: str, v: str) -> Optional[Fraction]:
        """Weight of arc (u, v), or None when the arc is absent."""
        return self._weights.get((u, v))

    def has_arc(self, u: str, v: str) -> bool:
        return (u, v) in self._weights


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph (the compatibility graph used for matchings)."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, Fraction], ...] = ()

    def __init__(self, vertices: Iterable[str], edges: Iterable[tuple[str, str, RationalLike]] = ()):
        object.__setattr__(self, "vertices", tuple(str(v) for v in vertices))
        object.__setattr__(
            self, "edges", tuple((str(u), str(v), to_rational(w)) for u, v, w in edges)
        )

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def key(self, u: str, v: str) -> Edge:
        """Canonical orientation of the pair {u, v}: earlier vertex first."""
        idx = self.index
        return (u, v) if idx[u] < idx[v] else (v, u)

    @cached_property
    def _weights(self) -> dict[Edge, Fraction]:
        return {self.key(u, v): w for u, v, w in self.edges}

    @cached_property
    def adjacency(self) -> dict[str, tuple[str, ...]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {v: tuple(ns) for v, ns in adj.items()}

    def weight(self, u: str, v: str) -> Fraction:
        try:
            return self._weights[self.key(u, v)]
        except KeyError:
            raise KeyError(f"no edge {u}-{v}") from None

    def has_edge(self, u: str, v: str) -> bool:
        if u not in self.index or v not in self.index or u == v:
            return False
        return self.key(u, v) in self._weights

    def total_weight(self) -> Fraction:
        return sum((w for _, _, w in self.edges), Fraction(0))

    def canonical_edges(self) -> list[Edge]:
        """Edges in canonical orientation, in input order."""
        return [self.key(u, v) for u, v, _ in self.edges]


@dataclass(frozen=True)
class Partition:
    """Ordered vertex partition V_1..V_n with one player label per class."""

    classes: tuple[tuple[str, ...], ...]
    labels: tuple[str, ...] = field(default=())

    def __init__(self, classes: Iterable[Iterable[str]], labels: Optional[Sequence[str]] = None):
        cls = tuple(tuple(str(v) for v in c) for c in classes)
        if labels is None:
            labels = [str(i + 1) for i in range(len(cls))]
        labels = tuple(str(x) for x in labels)
        if len(labels) != len(cls):
            raise ValueError("one label per class is required")
        if len(set(labels)) != len(labels):
            raise ValueError("class labels must be distinct")
        object.__setattr__(self, "classes", cls)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def singletons(cls, vertices: Iterable[str]) -> "Partition":
        vs = [str(v) for v in vertices]
        return cls([[v] for v in vs], labels=vs)

    @property
    def n(self) -> int:
        return len(self.classes)

    @property
    def width(self) -> int:
        return max((len(c) for c in self.classes), default=0)

    @cached_property
    def owner(self) -> dict[str, int]:
        """Vertex -> class index."""
        return {v: p for p, c in enumerate(self.classes) for v in c}

    @cached_property
    def position(self) -> dict[str, int]:
        """Player label -> class index."""
        return {lab: p for p, lab in enumerate(self.labels)}

    def members(self, label: str) -> tuple[str, ...]:
        return self.classes[self.position[label]]


AnyGraph = Union[Graph, DirectedGraph]


def underlying_undirected(g: DirectedGraph) -> Graph:
    """Keep pairs joined in both directions; edge weight is w_ij + w_ji."""
    edges = []
    seen: set[frozenset[str]] = set()
    for u, v, w in g.arcs:
        pair = frozenset((u, v))
        if pair in seen:
            continue
        back = g.weight(v, u)
        if back is None:
            continue
        seen.add(pair)
        edges.append((u, v, w + back))
    return Graph(g.vertices, edges)


def symmetric_lift(g: Graph) -> DirectedGraph:
    """Directed graph with both arcs of every edge, each carrying half its weight."""
    arcs = []
    for u, v, w in g.edges:
        arcs.append((u, v, w / 2))
        arcs.append((v, u, w / 2))
    return DirectedGraph(g.vertices, arcs)


def induced_subgraph(g: AnyGraph, s: Iterable[str]):
    """Subgraph on ``s`` keeping the host's vertex order."""
    keep = set(s)
    unknown = keep - set(g.vertices)
    if unknown:
        raise UnknownVertex(sorted(unknown)[0])
    vertices = [v for v in g.vertices if v in keep]
    if isinstance(g, DirectedGraph):
        return DirectedGraph(vertices, [a for a in g.arcs if a[0] in keep and a[1] in keep])
    return Graph(vertices, [e for e in g.edges if e[0] in keep and e[1] in keep])


def validate_instance(
    g: AnyGraph,
    partition: Optional[Partition] = None,
    capacities: Optional[Mapping[str, int]] = None,
) -> list[str]:
    """Return a list of human-readable violations; empty means valid."""
    problems: list[str] = []
    known = set()
    for v in g.vertices:
        if v in known:
            problems.append(f"duplicate vertex {v}")
        known.add(v)

    directed = isinstance(g, DirectedGraph)
    items = g.arcs if directed else g.edges
    kind = "arc" if directed else "edge"
    seen = set()
    for u, v, w in items:
        for end in (u, v):
            if end not in known:
                problems.append(f"{kind} {u}->{v} uses unknown vertex {end}")
        if u == v:
            problems.append(f"self-loop at vertex {u}")
        pair = (u, v) if directed else frozenset((u, v))
        if pair in seen:
            problems.append(f"duplicate {kind} {u}->{v}")
        seen.add(pair)
        if w <= 0:
            problems.append(f"{kind} {u}->{v} has nonpositive weight {w}")

    if partition is not None:
        covered: dict[str, int] = {}
        for p, cls in enumerate(partition.classes):
            if not cls:
                problems.append(f"class {partition.labels[p]} is empty")
            for v in cls:
                if v not in known:
                    problems.append(f"class {partition.labels[p]} has unknown vertex {v}")
                elif v in covered:
                    problems.append(f"vertex {v} appears in more than one class")
                covered[v] = p
        for v in g.vertices:
            if v not in covered:
                problems.append(f"partition does not cover vertex {v}")
        if partition.n == 0:
            problems.append("partition has no classes")

    if capacities is not None:
        for v, b in capacities.items():
            if v not in known:
                problems.append(f"capacity given for unknown vertex {v}")
            if not isinstance(b, int) or b <= 0:
                problems.append(f"capacity of {v} must be a positive integer, got {b!r}")
    return problems
