"""Partitioned matching games, b-matching games and their value oracles."""
from __future__ import annotations

import threading
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Iterable, Mapping, Optional, Union

from .errors import BoundExceeded, EdgeNotInGraph, NotAnAllocation, UnknownPlayer
from .graph import DirectedGraph, Edge, Graph, Partition, induced_subgraph, underlying_undirected
from .matching import edge_weights, max_weight_matching
from .rational import RationalLike, fmt, to_rational

Allocation = dict  # player label -> Fraction
SHAPLEY_BOUND = 12


class _ValueCache:
    """Thread-safe memo of coalition values keyed by frozenset of players."""

    def __init__(self):
        self._lock = threading.Lock()
        self._store: dict[frozenset, Fraction] = {}

    def get(self, key, compute):
        with self._lock:
            if key in self._store:
                return self._store[key]
        value = compute()
        with self._lock:
            self._store.setdefault(key, value)
        return value


class Game:
    """Common interface: an ordered tuple of players and a value oracle."""

    players: tuple[str, ...]

    def __init__(self):
        self._cache = _ValueCache()

    def _coalition(self, s: Iterable[str]) -> frozenset:
        s = frozenset(s)
        known = set(self.players)
        for p in s:
            if p not in known:
                raise UnknownPlayer(p)
        return s

    def value(self, s: Iterable[str]) -> Fraction:
        key = self._coalition(s)
        if not key:
            return Fraction(0)
        return self._cache.get(key, lambda: self._compute_value(key))

    def _compute_value(self, s: frozenset) -> Fraction:
        raise NotImplementedError

    @property
    def n(self) -> int:
        return len(self.players)

    def grand_value(self) -> Fraction:
        return self.value(self.players)


class PartitionedGame(Game):
    """Players are partition classes; v(S) is the optimum matching on their union.

    ``graph`` may be directed, in which case matchings live in the underlying
    undirected graph and arc weights drive the utilities u_p. With ``uniform``
    every undirected edge has weight 1 and utilities are kidney counts s_p.
    """

    def __init__(self, graph: Union[Graph, DirectedGraph], partition: Partition, uniform: bool = False):
        super().__init__()
        self.graph = graph
        self.partition = partition
        self.uniform = uniform
        self.directed = isinstance(graph, DirectedGraph)
        self.undirected = underlying_undirected(graph) if self.directed else graph
        self.weights = edge_weights(self.undirected, uniform=uniform)
        self.players = partition.labels

    def vertices_of(self, s: Iterable[str]) -> list[str]:
        pos = self.partition.position
        return [v for p in self._coalition(s) for v in self.partition.classes[pos[p]]]

    def _compute_value(self, s: frozenset) -> Fraction:
        sub = induced_subgraph(self.undirected, self.vertices_of(s))
        weights = {k: self.weights[self.undirected.key(*k)] for k in sub.canonical_edges()}
        return max_weight_matching(sub, weights)[1]

    def matching_weight(self, m: Iterable[Edge]) -> Fraction:
        total = Fraction(0)
        for u, v in m:
            if not self.undirected.has_edge(u, v):
                raise EdgeNotInGraph(f"{u}-{v}")
            total += self.weights[self.undirected.key(u, v)]
        return total


class BMatchingGame(Game):
    """Players are vertices; v(S) is the optimum b-matching of G[S]."""

    def __init__(self, graph: Graph, capacities: Optional[Mapping[str, int]] = None):
        super().__init__()
        self.graph = graph
        caps = dict(capacities or {})
        self.capacities = {v: int(caps.get(v, 1)) for v in graph.vertices}
        self.players = graph.vertices

    @property
    def max_capacity(self) -> int:
        return max(self.capacities.values(), default=0)

    def _compute_value(self, s: frozenset) -> Fraction:
        return b_coalition_value(self, s)


def coalition_value(game: Game, s: Iterable[str]) -> Fraction:
    return game.value(s)


def b_coalition_value(game: BMatchingGame, s: Iterable[str]) -> Fraction:
    """Optimum b-matching weight of G[S], through the vertex-copy expansion.

    The expansion of G[S] has an optimum exceeding the b-matching optimum by
    exactly the total edge weight of G[S].
    """
    from .reductions import tutte_expansion  # deferred: reductions imports this module

    s = game._coalition(s)
    if not s:
        return Fraction(0)
    sub = induced_subgraph(game.graph, s)
    if not sub.edges:
        return Fraction(0)
    exp = tutte_expansion(BMatchingGame(sub, {v: game.capacities[v] for v in sub.vertices}))
    return exp.result.grand_value() - sub.total_weight()


def country_kidney_counts(game: PartitionedGame, m: Iterable[Edge]) -> dict[str, int]:
    """s_p(M): matched vertices of each class, keyed by player label."""
    counts = {p: 0 for p in game.players}
    owner = game.partition.owner
    labels = game.partition.labels
    for u, v in m:
        if not game.undirected.has_edge(u, v):
            raise EdgeNotInGraph(f"{u}-{v}")
        counts[labels[owner[u]]] += 1
        counts[labels[owner[v]]] += 1
    return counts


def country_utilities(game: PartitionedGame, m: Iterable[Edge]) -> dict[str, Fraction]:
    """u_p(M): weight of the kidneys received by each class.

    For an undirected weighted game every edge counts as two arcs of half its
    weight.
    """
    util = {p: Fraction(0) for p in game.players}
    owner = game.partition.owner
    labels = game.partition.labels
    for u, v in m:
        if not game.undirected.has_edge(u, v):
            raise EdgeNotInGraph(f"{u}-{v}")
        for donor, patient in ((u, v), (v, u)):
            if game.directed:
                w = game.graph.weight(donor, patient)
            else:
                w = game.weights[game.undirected.key(u, v)] / 2
            util[labels[owner[patient]]] += w
    return util


def received(game: PartitionedGame, m: Iterable[Edge]) -> dict[str, Fraction]:
    """Per-country outcome used against targets: s_p for uniform games, else u_p."""
    if game.uniform:
        return {p: Fraction(c) for p, c in country_kidney_counts(game, m).items()}
    return country_utilities(game, m)


def outcome_total(game: PartitionedGame) -> Fraction:
    """Sum of per-country outcomes of any optimal matching (2v(N) on the s-scale)."""
    v = game.grand_value()
    return 2 * v if game.uniform else v


def check_allocation(game: Game, x: Mapping[str, RationalLike], total: Optional[Fraction] = None) -> Allocation:
    """Normalize ``x`` to exact values over all players and check its sum."""
    missing = [p for p in game.players if p not in x]
    if missing:
        raise NotAnAllocation(f"no value for player {missing[0]}")
    extra = [p for p in x if p not in set(game.players)]
    if extra:
        raise UnknownPlayer(extra[0])
    out = {p: to_rational(x[p]) for p in game.players}
    want = game.grand_value() if total is None else total
    got = sum(out.values(), Fraction(0))
    if got != want:
        raise NotAnAllocation(f"allocation sums to {fmt(got)}, expected {fmt(want)}")
    return out


def shapley_value(game: Game, bound: int = SHAPLEY_BOUND) -> Allocation:
    """Shapley value by the subset formula (2^n coalition values)."""
    n = game.n
    if n > bound:
        raise BoundExceeded("shapley_value", n, bound)
    players = game.players
    coef = [Fraction(factorial(k) * factorial(n - k - 1), factorial(n)) for k in range(n)]
    phi = {}
    for p in players:
        others = [q for q in players if q != p]
        total = Fraction(0)
        for k in range(len(others) + 1):
            for s in combinations(others, k):
                total += coef[k] * (game.value(s + (p,)) - game.value(s))
        phi[p] = total
    return phi


def allocation_to_json(x: Mapping[str, Fraction]) -> dict:
    return {"values": {p: fmt(v) for p, v in sorted(x.items())}}


def allocation_from_json(data: Mapping) -> Allocation:
    values = data.get("values", data)
    return {str(p): to_rational(v) for p, v in values.items()}
