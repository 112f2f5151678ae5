"""Maximum-weight matchings over ordered abelian weight groups.

Weights may be ints, Fractions or :class:`LexPair` values. Before solving,
every weight vector is mapped into the integers by an order-preserving
embedding (common-denominator scaling, and ``primary * K + secondary`` for
pairs with ``K`` larger than twice the total secondary mass). One blossom
solver therefore serves every weight domain, and results are exact.

The blossom solver itself is rustworkx's; networkx's pure-Python version is
the fallback for integers too wide for rustworkx.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

import networkx as nx
import rustworkx as rx

from .errors import BoundExceeded
from .graph import Edge, Graph, Partition
from .rational import RationalLike, to_rational

Matching = frozenset  # frozenset[Edge], edges in the host graph's canonical orientation

_RX_LIMIT = 1 << 60
DEFAULT_ENUMERATION_BOUND = 16


@total_ordering
@dataclass(frozen=True)
class LexPair:
    """Element of Q x Q ordered lexicographically (first component dominates)."""

    primary: Fraction
    secondary: Fraction

    def __init__(self, primary: RationalLike = 0, secondary: RationalLike = 0):
        object.__setattr__(self, "primary", to_rational(primary))
        object.__setattr__(self, "secondary", to_rational(secondary))

    def __add__(self, other: "LexPair") -> "LexPair":
        if not isinstance(other, LexPair):
            return NotImplemented
        return LexPair(self.primary + other.primary, self.secondary + other.secondary)

    def __sub__(self, other: "LexPair") -> "LexPair":
        if not isinstance(other, LexPair):
            return NotImplemented
        return LexPair(self.primary - other.primary, self.secondary - other.secondary)

    def __neg__(self) -> "LexPair":
        return LexPair(-self.primary, -self.secondary)

    def __lt__(self, other: "LexPair") -> bool:
        if not isinstance(other, LexPair):
            return NotImplemented
        return (self.primary, self.secondary) < (other.primary, other.secondary)

    def __repr__(self) -> str:
        return f"LexPair({self.primary}, {self.secondary})"


Weight = Union[int, Fraction, LexPair]


def zero_like(w: Weight) -> Weight:
    return LexPair() if isinstance(w, LexPair) else Fraction(0)


def matching_weight(m: Iterable[Edge], weights: Mapping[Edge, Weight], zero: Weight = Fraction(0)) -> Weight:
    total = zero
    for e in m:
        total = total + weights[e]
    return total


def edge_weights(g: Graph, uniform: bool = False) -> dict[Edge, Weight]:
    """Canonical edge -> weight map; ``uniform`` replaces every weight by 1."""
    if uniform:
        return {g.key(u, v): Fraction(1) for u, v, _ in g.edges}
    return {g.key(u, v): w for u, v, w in g.edges}


def is_matching(g: Graph, m: Iterable[Edge]) -> bool:
    used: set[str] = set()
    for u, v in m:
        if not g.has_edge(u, v) or u in used or v in used:
            return False
        used.update((u, v))
    return True


def covered_vertices(m: Iterable[Edge]) -> set[str]:
    return {x for e in m for x in e}


# -- integer embedding ------------------------------------------------------

def _lcm_of_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for q in values:
        out = out * q.denominator // math.gcd(out, q.denominator)
    return out


def _embed(values: Sequence[Weight]) -> list[int]:
    """Order-preserving map of a weight list into Z, additive on sub-sums."""
    if not values:
        return []
    if isinstance(values[0], LexPair):
        if not all(isinstance(v, LexPair) for v in values):
            raise TypeError("cannot mix LexPair and scalar weights")
        ps = [v.primary for v in values]
        ss = [v.secondary for v in values]
        dp, ds = _lcm_of_denominators(ps), _lcm_of_denominators(ss)
        pi = [int(p * dp) for p in ps]
        si = [int(s * ds) for s in ss]
        k = 2 * sum(abs(s) for s in si) + 1
        return [p * k + s for p, s in zip(pi, si)]
    qs = [to_rational(v) if not isinstance(v, Fraction) else v for v in values]
    d = _lcm_of_denominators(qs)
    return [int(q * d) for q in qs]


def _solve_int(n: int, edges: Sequence[tuple[int, int, int]], maxcardinality: bool) -> dict[int, int]:
    """Run the blossom algorithm on integer weights; returns vertex -> mate."""
    mate: dict[int, int] = {}
    if not edges:
        return mate
    widest = max(abs(w) for _, _, w in edges)
    if widest < _RX_LIMIT:
        rg = rx.PyGraph()
        rg.add_nodes_from(range(n))
        rg.add_edges_from(edges)
        pairs = rx.max_weight_matching(rg, max_cardinality=maxcardinality, weight_fn=lambda w: w)
    else:
        ng = nx.Graph()
        ng.add_nodes_from(range(n))
        ng.add_weighted_edges_from(edges)
        pairs = nx.max_weight_matching(ng, maxcardinality=maxcardinality)
    for u, v in pairs:
        mate[u] = v
        mate[v] = u
    return mate


def _prepare(g: Graph, weights: Optional[Mapping[Edge, Weight]]):
    if weights is None:
        weights = edge_weights(g)
    keys = g.canonical_edges()
    idx = g.index
    ints = _embed([weights[k] for k in keys])
    return weights, keys, [(idx[u], idx[v], w) for (u, v), w in zip(keys, ints)]


def _to_matching(g: Graph, mate: dict[int, int]) -> Matching:
    vs = g.vertices
    return frozenset(g.key(vs[u], vs[v]) for u, v in mate.items() if u < v)


def _zero_for(weights: Mapping[Edge, Weight]) -> Weight:
    for w in weights.values():
        return zero_like(w)
    return Fraction(0)


# -- public solvers ---------------------------------------------------------

def max_weight_matching(
    g: Graph, weights: Optional[Mapping[Edge, Weight]] = None
) -> tuple[Matching, Weight]:
    """Maximum-weight matching of ``g`` and its weight.

    ``weights`` maps canonical edges to nonnegative weights and defaults to the
    graph's own edge weights.
    """
    weights, _, edges = _prepare(g, weights)
    mate = _solve_int(len(g.vertices), [e for e in edges if e[2] > 0], maxcardinality=False)
    m = _to_matching(g, mate)
    return m, matching_weight(m, weights, _zero_for(weights))


def max_weight_perfect_matching(
    g: Graph, weights: Optional[Mapping[Edge, Weight]] = None
) -> Optional[tuple[Matching, Weight]]:
    """Maximum-weight perfect matching, or None when no perfect matching exists."""
    n = len(g.vertices)
    if n % 2:
        return None
    weights, _, edges = _prepare(g, weights)
    if n == 0:
        return frozenset(), _zero_for(weights)
    # Every perfect matching has n/2 edges, so a uniform shift keeps the order
    # among them and makes all weights positive.
    shift = 1 - min((w for _, _, w in edges), default=0)
    mate = _solve_int(n, [(u, v, w + shift) for u, v, w in edges], maxcardinality=True)
    if len(mate) != n:
        return None
    m = _to_matching(g, mate)
    return m, matching_weight(m, weights, _zero_for(weights))


def max_weight_covering_matching(
    g: Graph,
    mandatory: Iterable[str],
    weights: Optional[Mapping[Edge, Weight]] = None,
) -> Optional[tuple[Matching, Weight]]:
    """Maximum-weight matching among those covering every ``mandatory`` vertex.

    Returns None when no matching covers them all. Other vertices may stay
    exposed.
    """
    weights, _, edges = _prepare(g, weights)
    must = {g.index[v] for v in mandatory}
    bonus = 2 * sum(abs(w) for _, _, w in edges) + 1
    boosted = [(u, v, w + bonus * ((u in must) + (v in must))) for u, v, w in edges]
    mate = _solve_int(len(g.vertices), [e for e in boosted if e[2] > 0], maxcardinality=False)
    if not must.issubset(mate):
        return None
    m = _to_matching(g, mate)
    return m, matching_weight(m, weights, _zero_for(weights))


# -- exhaustive oracle ------------------------------------------------------

def _search(g: Graph, weights: Mapping[Edge, Weight], target=None):
    """Depth-first search over matchings with a weight upper bound.

    With ``target`` None, returns the maximum matching weight. Otherwise yields
    every matching whose weight equals ``target``. Rational weights are
    scaled to integers first.
    """
    if weights and all(isinstance(w, (int, Fraction)) for w in weights.values()):
        scale = math.lcm(*(Fraction(w).denominator for w in weights.values()))
        scaled = {e: int(w * scale) for e, w in weights.items()}
        if target is None:
            return Fraction(_search_core(g, scaled), scale)
        t = Fraction(target) * scale
        return _search_core(g, scaled, int(t)) if t.denominator == 1 else iter(())
    return _search_core(g, weights, target)


def _search_core(g: Graph, weights: Mapping[Edge, Weight], target=None):
    vs = g.vertices
    zero = 0 if all(type(w) is int for w in weights.values()) else _zero_for(weights)
    best_incident = {}
    for v in vs:
        best = zero
        for u in g.adjacency[v]:
            w = weights[g.key(u, v)]
            if w > best:
                best = w
        best_incident[v] = best
    potential = zero
    for v in vs:
        potential = potential + best_incident[v]

    covered: set[str] = set()
    chosen: list[Edge] = []
    state = {"best": None}

    def bound_ok(cur, pot) -> bool:
        limit = state["best"] if target is None else target
        if limit is None:
            return True
        # 2*cur + pot bounds twice the best completion
        return cur + cur + pot >= limit + limit

    order = {v: i for i, v in enumerate(vs)}

    free = {v: len(g.adjacency[v]) for v in vs}  # uncovered neighbours

    def cover(v):
        covered.add(v)
        for u in g.adjacency[v]:
            free[u] -= 1

    def uncover(v):
        covered.discard(v)
        for u in g.adjacency[v]:
            free[u] += 1

    def pick() -> Optional[str]:
        """Uncovered vertex with fewest uncovered neighbours (earliest on ties)."""
        best_v, best_deg = None, None
        for v in vs:
            if v in covered:
                continue
            deg = free[v]
            if best_deg is None or deg < best_deg:
                best_v, best_deg = v, deg
                if deg == 0:
                    break
        return best_v

    def rec(cur, pot):
        v = pick()
        if v is None:
            if target is None:
                if state["best"] is None or cur > state["best"]:
                    state["best"] = cur
            elif cur == target:
                yield frozenset(chosen)
            return
        if not bound_ok(cur, pot):
            return
        cover(v)
        pot_v = pot - best_incident[v]
        for u in sorted(g.adjacency[v], key=order.__getitem__):
            if u in covered:
                continue
            e = g.key(u, v)
            cover(u)
            chosen.append(e)
            yield from rec(cur + weights[e], pot_v - best_incident[u])
            chosen.pop()
            uncover(u)
        # leave v exposed
        yield from rec(cur, pot_v)
        uncover(v)

    if target is None:
        for _ in rec(zero, potential):
            pass
        return state["best"] if state["best"] is not None else zero
    return rec(zero, potential)


def enumerate_optimal_matchings(
    g: Graph,
    weights: Optional[Mapping[Edge, Weight]] = None,
    bound: int = DEFAULT_ENUMERATION_BOUND,
) -> Iterator[Matching]:
    """Yield every maximum-weight matching of ``g`` exactly once.

    Pure exhaustive search, independent of the blossom solver. Zero-weight
    edges are ignored (they never change the weight, so including them would
    only multiply equivalent matchings).
    """
    if len(g.vertices) > bound:
        raise BoundExceeded("enumerate_optimal_matchings", len(g.vertices), bound)
    if weights is None:
        weights = edge_weights(g)
    zero = _zero_for(weights)
    positive = [(u, v, 1) for u, v, _ in g.edges if weights[g.key(u, v)] > zero]
    h = Graph(g.vertices, positive)
    w_h = {h.key(u, v): weights[g.key(u, v)] for u, v, _ in positive}
    # The optimal set is the product of the components' optimal sets.
    parts = []
    for comp in nx.connected_components(nx.Graph([(u, v) for u, v, _ in positive])):
        sub = Graph([v for v in h.vertices if v in comp], [e for e in positive if e[0] in comp])
        w_sub = {e: w_h[e] for e in sub.canonical_edges()}
        best = _search(sub, w_sub)
        parts.append([[g.key(u, v) for u, v in m] for m in _search(sub, w_sub, target=best)])
    for combo in itertools.product(*parts):
        yield frozenset(e for m in combo for e in m)


def optimum_by_enumeration(g: Graph, weights: Optional[Mapping[Edge, Weight]] = None,
                           bound: int = DEFAULT_ENUMERATION_BOUND) -> Weight:
    if len(g.vertices) > bound:
        raise BoundExceeded("optimum_by_enumeration", len(g.vertices), bound)
    if weights is None:
        weights = edge_weights(g)
    return _search(g, weights)


# -- interval-constrained optimal matchings ---------------------------------

@dataclass(frozen=True)
class Interval:
    """Interval of the real line; ``None`` endpoints are unbounded."""

    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    lo_open: bool = False
    hi_open: bool = False

    @classmethod
    def closed(cls, lo: RationalLike, hi: RationalLike) -> "Interval":
        return cls(to_rational(lo), to_rational(hi))

    @classmethod
    def open(cls, lo: RationalLike, hi: RationalLike) -> "Interval":
        return cls(to_rational(lo), to_rational(hi), True, True)

    @classmethod
    def point(cls, value: RationalLike) -> "Interval":
        q = to_rational(value)
        return cls(q, q)

    def integer_bounds(self, cap: int) -> Optional[tuple[int, int]]:
        """Largest closed integer interval inside self and [0, cap], or None."""
        a = 0
        if self.lo is not None:
            a = max(a, math.floor(self.lo) + 1 if self.lo_open else math.ceil(self.lo))
        b = cap
        if self.hi is not None:
            b = min(b, math.ceil(self.hi) - 1 if self.hi_open else math.floor(self.hi))
        return (a, b) if a <= b else None

    def __contains__(self, value) -> bool:
        if self.lo is not None and (value < self.lo or (self.lo_open and value == self.lo)):
            return False
        if self.hi is not None and (value > self.hi or (self.hi_open and value == self.hi)):
            return False
        return True


def country_counts(partition: Partition, m: Iterable[Edge]) -> list[int]:
    """s_p(M): number of vertices of each class covered by ``m``."""
    s = [0] * partition.n
    owner = partition.owner
    for u, v in m:
        s[owner[u]] += 1
        s[owner[v]] += 1
    return s


def _fresh_namer(taken: Iterable[str]):
    used = set(taken)

    def name(base: str) -> str:
        cand = base
        while cand in used:
            cand = "#" + cand
        used.add(cand)
        return cand

    return name


@dataclass(frozen=True)
class Extension:
    """The auxiliary graph built for one set of class-count bounds."""

    graph: Graph
    weights: dict
    mandatory: frozenset  # original vertices and every B-vertex
    a_vertices: tuple[str, ...]
    parity: Optional[str]


def lemma1_extension(
    g: Graph,
    partition: Partition,
    bounds: Sequence[tuple[int, int]],
    weights: Optional[Mapping[Edge, Weight]] = None,
    literal: bool = True,
) -> Extension:
    """Extension graph for class-count bounds ``a_p <= s_p <= b_p``.

    For each class p it adds |V_p| - b_p vertices B_p and b_p - a_p vertices
    A_p, each joined to all of V_p by zero-weight edges. The literal form also
    joins all A-vertices pairwise and adds a parity vertex joined to every
    A-vertex when the vertex count is odd; then a perfect matching of weight
    equal to the optimum of ``g`` exists iff the bounds are attainable.

    With ``literal=False`` the A-clique and parity vertex are left out: A-vertices
    are simply allowed to stay exposed, which is equivalent (leftover A-vertices
    can always be paired through the clique and parity vertex) and far sparser.
    """
    if weights is None:
        weights = edge_weights(g)
    zero = _zero_for(weights)
    fresh = _fresh_namer(g.vertices)
    vertices = list(g.vertices)
    edges: list[tuple[str, str, Fraction]] = [(u, v, Fraction(0)) for u, v, _ in g.edges]
    ext_w: dict[Edge, Weight] = {}
    b_vertices: list[str] = []
    a_vertices: list[str] = []
    gadget_edges: list[tuple[str, str]] = []
    for p, (cls, (a, b)) in enumerate(zip(partition.classes, bounds)):
        if not 0 <= a <= b <= len(cls):
            raise ValueError(f"bounds for class {p} must satisfy 0 <= a <= b <= |V_p|")
        for k in range(len(cls) - b):
            x = fresh(f"B{p}.{k}")
            b_vertices.append(x)
            vertices.append(x)
            gadget_edges.extend((x, v) for v in cls)
        for k in range(b - a):
            x = fresh(f"A{p}.{k}")
            a_vertices.append(x)
            vertices.append(x)
            gadget_edges.extend((x, v) for v in cls)
    parity = None
    if literal:
        gadget_edges.extend(
            (a_vertices[i], a_vertices[j])
            for i in range(len(a_vertices))
            for j in range(i + 1, len(a_vertices))
        )
        if len(vertices) % 2:
            parity = fresh("P")
            vertices.append(parity)
            gadget_edges.extend((parity, x) for x in a_vertices)
    edges.extend((u, v, Fraction(0)) for u, v in gadget_edges)
    ext = Graph(vertices, edges)
    for u, v, _ in g.edges:
        ext_w[ext.key(u, v)] = weights[g.key(u, v)]
    for u, v in gadget_edges:
        ext_w[ext.key(u, v)] = zero
    assert len(ext.vertices) <= 2 * len(g.vertices) + 1
    return Extension(ext, ext_w, frozenset(g.vertices) | frozenset(b_vertices), tuple(a_vertices), parity)


class IntervalSolver:
    """Repeated interval-constrained queries on one weighted partitioned graph.

    The unconstrained optimum is computed once and reused by every query.
    """

    def __init__(self, g: Graph, partition: Partition, weights: Optional[Mapping[Edge, Weight]] = None):
        self.g = g
        self.partition = partition
        self.weights = dict(weights) if weights is not None else edge_weights(g)
        _, self.optimum = max_weight_matching(g, self.weights)
        self.calls = 0
        # integer data for the covering form, built once
        _, self._keys, self._edges = _prepare(g, self.weights)
        mate = _solve_int(len(g.vertices), [e for e in self._edges if e[2] > 0], maxcardinality=False)
        self._int_optimum = self._int_weight(mate)
        self._classes = [[g.index[v] for v in cls] for cls in partition.classes]

    def _int_weight(self, mate: dict[int, int]) -> int:
        return sum(w for u, v, w in self._edges if mate.get(u) == v)

    def _solve_covering(self, bounds: Sequence[tuple[int, int]]) -> Optional[Matching]:
        """The covering form of the extension, built directly on vertex indices."""
        n = len(self.g.vertices)
        edges = list(self._edges)
        must = set(range(n))
        nxt = n
        for cls, (a, b) in zip(self._classes, bounds):
            if not 0 <= a <= b <= len(cls):
                raise ValueError("bounds must satisfy 0 <= a <= b <= |V_p|")
            for k in range(len(cls) - a):  # |V_p| - b mandatory B-vertices, then b - a optional A-vertices
                if k < len(cls) - b:
                    must.add(nxt)
                edges.extend((nxt, v, 0) for v in cls)
                nxt += 1
        bonus = 2 * sum(abs(w) for _, _, w in self._edges) + 1
        boosted = [(u, v, w + bonus * ((u in must) + (v in must))) for u, v, w in edges]
        mate = _solve_int(nxt, [e for e in boosted if e[2] > 0], maxcardinality=False)
        if not must.issubset(mate) or self._int_weight(mate) != self._int_optimum:
            return None
        vs = self.g.vertices
        return frozenset(self.g.key(vs[u], vs[v]) for u, v in mate.items() if u < v < n)

    def solve_bounds(self, bounds: Sequence[tuple[int, int]], literal: bool = False) -> Optional[Matching]:
        """Matching in the optimal set with a_p <= s_p(M) <= b_p for all p, or None."""
        self.calls += 1
        if not literal:
            return self._solve_covering(bounds)
        ext = lemma1_extension(self.g, self.partition, bounds, self.weights, literal=True)
        found = max_weight_perfect_matching(ext.graph, ext.weights)
        if found is None or found[1] != self.optimum:
            return None
        m, _ = found
        return frozenset(self.g.key(u, v) for u, v in m if self.g.has_edge(u, v))

    def solve(self, constraints: Sequence[Interval], literal: bool = False) -> Optional[Matching]:
        bounds = []
        for cls, iv in zip(self.partition.classes, constraints, strict=False):
            nb = iv.integer_bounds(len(cls))
            if nb is None:
                return None
            bounds.append(nb)
        if len(bounds) != self.partition.n:
            raise ValueError("one interval per class is required")
        return self.solve_bounds(bounds, literal=literal)


def interval_constrained_optimal_matching(
    g: Graph,
    partition: Partition,
    constraints: Union[Sequence[Interval], Mapping[str, Interval]],
    weights: Optional[Mapping[Edge, Weight]] = None,
    literal: bool = False,
) -> Optional[Matching]:
    """A maximum-weight matching M with s_p(M) in I_p for every class, or None.

    ``constraints`` is one interval per class, either positionally or keyed by
    class label. Open endpoints are shrunk to the enclosed integers; an interval
    without integers makes the query infeasible.
    """
    if isinstance(constraints, Mapping):
        constraints = [constraints.get(lab, Interval()) for lab in partition.labels]
    return IntervalSolver(g, partition, weights).solve(list(constraints), literal=literal)
