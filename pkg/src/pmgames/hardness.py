"""Instance generators for the hardness constructions, with brute-force oracles.

Each generator returns a :class:`GeneratedInstance` holding the game, the
target allocation and the raw parameters, so tests can recompute every
number independently.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterator, Mapping, Optional, Sequence

import numpy as np

from .errors import BoundExceeded, NotBipartite, NotPerfectGame
from .games import BMatchingGame, PartitionedGame
from .graph import DirectedGraph, Edge, Graph, Partition, symmetric_lift
from .lexmin import minimal_matching_bruteforce
from .rational import RationalLike, fmt, to_rational

EPM_BOUND = 16


@dataclass(frozen=True)
class GeneratedInstance:
    game: object  # PartitionedGame or BMatchingGame
    target: dict  # player -> Fraction (empty when the construction has none)
    meta: dict = field(default_factory=dict)


# -- Partition, two countries -------------------------------------------------

def gen_partition_instance(a: Sequence[int]) -> GeneratedInstance:
    """Two countries; item i is a vertex v_i in exchange with v_i' (country 1) or v_i'' (country 2).

    Each exchange has both arcs of weight a_i, and the target is
    (3/2 sum a, 1/2 sum a). The target is met exactly iff the a_i split evenly.
    """
    a = [int(v) for v in a]
    if not a:
        raise ValueError("need at least one number")
    if any(v <= 0 for v in a):
        raise ValueError("numbers must be positive")
    vs, arcs, v1, v2 = [], [], [], []
    for i, ai in enumerate(a, 1):
        x, xp, xpp = f"v{i}", f"v{i}'", f"v{i}''"
        vs += [x, xp, xpp]
        v1 += [x, xp]
        v2.append(xpp)
        arcs += [(x, xp, ai), (xp, x, ai), (x, xpp, ai), (xpp, x, ai)]
    total = sum(a)
    game = PartitionedGame(DirectedGraph(vs, arcs), Partition([v1, v2]))
    return GeneratedInstance(game, {"1": Fraction(3 * total, 2), "2": Fraction(total, 2)}, {"a": a})


def has_even_split(a: Sequence[int]) -> bool:
    """Subset-sum check: can ``a`` be split into two halves of equal sum?"""
    total = sum(a)
    if total % 2:
        return False
    reach = {0}
    for v in a:
        reach |= {r + v for r in reach}
    return total // 2 in reach


# -- 3-Partition, paths -------------------------------------------------------

def gen_3partition_instance(a: Sequence[int], c: int, L: Optional[int] = None) -> GeneratedInstance:
    """k+1 countries built from 3k sources, 3k sinks and (3k)^2 alternating paths.

    The path from each source to sink z_q has 2a_q - 1 edges whose arc
    weights alternate L+1, L, ..., L+1. Country p owns the paths leaving its
    three sources (sinks excluded); country k+1 owns the sinks.
    """
    a = [int(v) for v in a]
    c = int(c)
    if not a or len(a) % 3:
        raise ValueError("need 3k numbers")
    k = len(a) // 3
    if sum(a) != k * c:
        raise ValueError("numbers must sum to k*c")
    if not all(4 * v > c and 2 * v < c for v in a):
        raise ValueError("every number must lie strictly between c/4 and c/2")
    L = k * c + 1 if L is None else int(L)
    if L <= k * c:
        raise ValueError("L must exceed k*c")
    sinks = [f"z{q}" for q in range(1, 3 * k + 1)]
    vs: list[str] = []
    arcs = []
    classes = []
    for p in range(1, k + 1):
        cls = []
        for src in (f"s{p}", f"s{p}'", f"s{p}''"):
            vs.append(src)
            cls.append(src)
            for q, aq in enumerate(a, 1):
                inner = [f"P[{src},{q}].{t}" for t in range(1, 2 * aq - 1)]
                vs += inner
                cls += inner
                path = [src] + inner + [sinks[q - 1]]
                for t in range(len(path) - 1):
                    w = L + 1 if t % 2 == 0 else L
                    arcs += [(path[t], path[t + 1], w), (path[t + 1], path[t], w)]
        classes.append(cls)
    vs += sinks
    classes.append(list(sinks))
    game = PartitionedGame(DirectedGraph(vs, arcs), Partition(classes))
    # Each source has one fully matched path (to z_q) and 3k-1 paths matched
    # internally only; summing both kinds over the three sources of p gives
    # u_p = 2T + 6L(sum(a) - 3k + 1) - 3(L+1), T the a-sum of p's three sinks.
    total = sum(a)
    target = {str(p): Fraction(2 * c + 6 * L * (total - 3 * k + 1) - 3 * (L + 1)) for p in range(1, k + 1)}
    target[str(k + 1)] = Fraction(3 * k * (L + 1))
    return GeneratedInstance(game, target, {"a": a, "c": c, "k": k, "L": L})


def has_3partition(a: Sequence[int], c: int) -> bool:
    """Exhaustive check for a split of ``a`` into triples each summing to ``c``."""
    items = sorted(a)

    def rec(rest: list[int]) -> bool:
        if not rest:
            return True
        first, others = rest[0], rest[1:]
        for i, j in combinations(range(len(others)), 2):
            if first + others[i] + others[j] == c:
                left = [v for t, v in enumerate(others) if t not in (i, j)]
                if rec(left):
                    return True
        return False

    return len(items) % 3 == 0 and rec(items)


# -- compact cycles -----------------------------------------------------------

@dataclass(frozen=True)
class CompactCycles:
    """Disjoint even cycles, each stored as (a_i, L); expanded only on demand."""

    cycles: tuple[tuple[int, Fraction], ...]

    def to_json(self) -> dict:
        return {"compact_cycles": [{"a": a, "L": fmt(L)} for a, L in self.cycles]}

    @classmethod
    def from_json(cls, data: Mapping) -> "CompactCycles":
        return cls(tuple((int(c["a"]), to_rational(c["L"])) for c in data["compact_cycles"]))


def cycle_layout(i: int, a: int, L: Fraction) -> tuple[list[str], list[tuple[str, str, Fraction]], list[str], list[str]]:
    """Vertices, weighted edges and the two halves of one cycle of length 4a+4.

    Going round: e (weight L), then P_1 (2a+1 edges, L+1 first and
    alternating, last one L+1/2), then e-bar (weight L+1), then P_2 walked
    back towards e (L first and alternating, last one L+1/2).
    """
    n = 4 * a + 4
    vs = [f"C{i}.{j}" for j in range(n)]
    half = Fraction(1, 2)
    edges = [(vs[0], vs[1], L)]
    for t in range(1, 2 * a + 2):  # P_1 edges, t-th from e
        w = L + half if t == 2 * a + 1 else (L + 1 if t % 2 else L)
        edges.append((vs[t], vs[t + 1], w))
    edges.append((vs[2 * a + 2], vs[2 * a + 3], L + 1))
    p2 = [vs[0]] + vs[: 2 * a + 2 : -1]  # from e's end back to e-bar's end
    for t in range(1, 2 * a + 2):
        w = L + half if t == 2 * a + 1 else (L if t % 2 else L + 1)
        edges.append((p2[t - 1], p2[t], w))
    u1 = vs[1 : 2 * a + 3]
    u2 = [vs[0]] + vs[2 * a + 3 :]
    return vs, edges, u1, u2


def expand_cycles(compact: CompactCycles) -> PartitionedGame:
    vs, edges, v1, v2 = [], [], [], []
    for i, (a, L) in enumerate(compact.cycles, 1):
        cv, ce, u1, u2 = cycle_layout(i, a, L)
        vs += cv
        edges += ce
        v1 += u1
        v2 += u2
    return PartitionedGame(symmetric_lift(Graph(vs, edges)), Partition([v1, v2]))


def recompact_cycles(game: PartitionedGame) -> CompactCycles:
    """Recover (a_i, L) per cycle from an expanded instance (inverse of expansion)."""
    g = game.undirected
    seen: set[str] = set()
    out = []
    for start in g.vertices:
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in g.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        n = len(comp)
        if n % 4 or any(len(g.adjacency[v]) != 2 for v in comp):
            raise ValueError("component is not a cycle of length divisible by 4")
        members = set(comp)
        weights = [w for u, v, w in g.edges if u in members]
        out.append(((n - 4) // 4, min(weights)))
    return CompactCycles(tuple(out))


def gen_compact_cycle_instance(a: Sequence[int], L: Optional[RationalLike] = None, normalize: bool = False) -> GeneratedInstance:
    """Two countries on k disjoint cycles, target x_1 = x_2 = L sum(a_i+1) + sum(a)/2 + k/2.

    The target is met iff the a_i split into two halves of equal sum. With
    ``normalize`` the numbers are first padded to an even count, shifted so
    any even split has k/2 members, and mapped to odd values. L defaults to
    sum(a) + 1, which keeps the two perfect matchings of every cycle the only
    maximum-weight matchings.
    """
    a = [int(v) for v in a]
    if not a:
        raise ValueError("need at least one number")
    if any(v < 0 for v in a):
        raise ValueError("numbers must be nonnegative")
    if normalize:
        if len(a) % 2:
            a.append(0)
        shift = sum(a) + 1
        a = [2 * (v + shift) + 1 for v in a]
    L = Fraction(sum(a) + 1) if L is None else to_rational(L)
    if a and L <= max(a):
        raise ValueError("L must exceed every a_i")
    compact = CompactCycles(tuple((v, L) for v in a))
    k = len(a)
    t = L * sum(v + 1 for v in a) + Fraction(sum(a), 2) + Fraction(k, 2)
    return GeneratedInstance(compact, {"1": t, "2": t}, {"a": a, "L": L, "k": k})


# -- nearly 3-regular subgraphs -----------------------------------------------

def gen_nearly3regular_bgame(g: Graph) -> BMatchingGame:
    """Uniform b-matching game on 13|V|+1 vertices built around ``g``.

    Each v in V (capacity 3) hangs three triangles (a_vj, c_vj, d_vj; capacity
    2) joined to hubs a_v, c_v, d_v (capacity 3); a root r (capacity 1) sees
    all of V. The edges of ``g`` are kept.
    """
    vs: list[str] = list(g.vertices)
    edges = [(u, v, 1) for u, v, _ in g.edges]
    caps = {v: 3 for v in g.vertices}
    for v in g.vertices:
        for j in (1, 2, 3):
            a, c, d = f"a[{v},{j}]", f"c[{v},{j}]", f"d[{v},{j}]"
            vs += [a, c, d]
            caps.update({a: 2, c: 2, d: 2})
            edges += [(v, a, 1), (a, c, 1), (c, d, 1), (d, a, 1)]
        for hub in "acd":
            h = f"{hub}[{v}]"
            vs.append(h)
            caps[h] = 3
            edges += [(h, f"{hub}[{v},{j}]", 1) for j in (1, 2, 3)]
    vs.append("r")
    caps["r"] = 1
    if len(set(vs)) != len(vs):
        raise ValueError("input vertex names clash with gadget vertex names")
    edges += [("r", v, 1) for v in g.vertices]
    return BMatchingGame(Graph(vs, edges), caps)


def nearly3regular_allocation(g: Graph) -> dict[str, Fraction]:
    """3/2 on V and on the hubs, 1 on triangle vertices, 0 on the root."""
    x = {v: Fraction(3, 2) for v in g.vertices}
    for v in g.vertices:
        for hub in "acd":
            x[f"{hub}[{v}]"] = Fraction(3, 2)
            for j in (1, 2, 3):
                x[f"{hub}[{v},{j}]"] = Fraction(1)
    x["r"] = Fraction(0)
    return x


def _components(g: Graph) -> list[list[str]]:
    seen: set[str] = set()
    comps = []
    for s in g.vertices:
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in g.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        comps.append(comp)
    return comps


def _degree_subgraph(g: Graph, accept: Callable[[list[int]], bool], max_edges: int = 24) -> Optional[list[Edge]]:
    """Nonempty edge subset of one component whose positive degrees pass ``accept``."""
    for comp in _components(g):
        keep = set(comp)
        es = [g.key(u, v) for u, v, _ in g.edges if u in keep]
        if len(es) > max_edges:
            raise BoundExceeded("degree subgraph search", len(es), max_edges)
        for mask in range(1, 1 << len(es)):
            deg: dict[str, int] = defaultdict(int)
            for i, (u, v) in enumerate(es):
                if mask >> i & 1:
                    deg[u] += 1
                    deg[v] += 1
            if accept(sorted(deg.values())):
                return [e for i, e in enumerate(es) if mask >> i & 1]
    return None


def find_nearly3regular_subgraph(g: Graph, max_edges: int = 24) -> Optional[list[Edge]]:
    """Edges of a subgraph with one vertex of degree 2 and the rest of degree 3."""
    return _degree_subgraph(g, lambda d: d[0] == 2 and all(x == 3 for x in d[1:]), max_edges)


def find_3regular_subgraph(g: Graph, max_edges: int = 24) -> Optional[list[Edge]]:
    return _degree_subgraph(g, lambda d: all(x == 3 for x in d), max_edges)


def bipartition(g: Graph) -> Optional[tuple[list[str], list[str]]]:
    side: dict[str, int] = {}
    for comp in _components(g):
        side[comp[0]] = 0
        stack = [comp[0]]
        while stack:
            v = stack.pop()
            for u in g.adjacency[v]:
                if u not in side:
                    side[u] = 1 - side[v]
                    stack.append(u)
                elif side[u] == side[v]:
                    return None
    return [v for v in g.vertices if side[v] == 0], [v for v in g.vertices if side[v] == 1]


def bipartite_to_nearly3regular(g: Graph) -> Graph:
    """|E| disjoint copies of ``g``; in copy e the edge e is subdivided by a new vertex."""
    if bipartition(g) is None:
        raise NotBipartite("input graph has an odd cycle")
    vs: list[str] = []
    edges = []
    for t, (p, q, _) in enumerate(g.edges, 1):
        name = {v: f"{v}#{t}" for v in g.vertices}
        vs += name.values()
        sub = f"s#{t}"
        vs.append(sub)
        for u, v, _ in g.edges:
            if (u, v) == (p, q):
                edges += [(name[u], sub, 1), (sub, name[v], 1)]
            else:
                edges.append((name[u], name[v], 1))
    return Graph(vs, edges)


# -- Exact Perfect Matching ---------------------------------------------------

@dataclass(frozen=True)
class RedBlueGraph:
    graph: Graph
    red: frozenset  # canonical edges coloured red; the rest are blue
    k: int = 0

    def color(self, e: Edge) -> str:
        return "red" if self.graph.key(*e) in self.red else "blue"

    def to_json(self) -> dict:
        return {
            "vertices": list(self.graph.vertices),
            "edges": [{"from": u, "to": v, "color": self.color((u, v))} for u, v, _ in self.graph.edges],
            "k": self.k,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RedBlueGraph":
        vs = [str(v) for v in data["vertices"]]
        es = [(str(e["from"]), str(e["to"]), 1) for e in data["edges"]]
        g = Graph(vs, es)
        red = frozenset(g.key(str(e["from"]), str(e["to"])) for e in data["edges"] if e.get("color") == "red")
        return cls(g, red, int(data.get("k", 0)))


def enumerate_perfect_matchings(g: Graph) -> Iterator[frozenset]:
    """Every perfect matching, branching on the first uncovered vertex."""
    vs = g.vertices
    covered: set[str] = set()
    chosen: list[Edge] = []

    def rec(i: int):
        while i < len(vs) and vs[i] in covered:
            i += 1
        if i == len(vs):
            yield frozenset(chosen)
            return
        v = vs[i]
        covered.add(v)
        for u in g.adjacency[v]:
            if u not in covered:
                covered.add(u)
                chosen.append(g.key(u, v))
                yield from rec(i + 1)
                chosen.pop()
                covered.discard(u)
        covered.discard(v)

    if len(vs) % 2 == 0:
        yield from rec(0)


def brute_force_epm(rb: RedBlueGraph, k: Optional[int] = None, bound: int = EPM_BOUND) -> Optional[frozenset]:
    """A perfect matching with exactly k red edges, or None."""
    g = rb.graph
    k = rb.k if k is None else k
    if len(g.vertices) > bound:
        raise BoundExceeded("brute_force_epm", len(g.vertices), bound)
    for m in enumerate_perfect_matchings(g):
        if sum(1 for e in m if e in rb.red) == k:
            return m
    return None


@dataclass(frozen=True)
class Subdivision:
    game: PartitionedGame
    ends: dict  # canonical edge (i, j) -> (i', j') subdivision vertices
    cross_weight: Fraction  # arc weight from a country-1 vertex to a country-2 vertex


def subdivided_game(rb: RedBlueGraph, cross_weight: RationalLike = Fraction(1, 3)) -> Subdivision:
    """Subdivide every edge twice; country 1 owns the subdivision vertices of red edges.

    Cross arcs carry ``cross_weight`` towards country 2 and the complement
    towards country 1; all other arcs carry 1/2, so every edge weighs 1.
    """
    cw = to_rational(cross_weight)
    if cw == Fraction(1, 2) or not 0 < cw < 1:
        raise ValueError("cross weight must lie in (0, 1) and differ from 1/2")
    g = rb.graph
    vs = list(g.vertices)
    v1: list[str] = []
    ends = {}
    pairs = []
    for u, v, _ in g.edges:
        i, j = g.key(u, v)
        ip, jp = f"{i}'{j}", f"{j}'{i}"
        vs += [ip, jp]
        ends[(i, j)] = (ip, jp)
        if (i, j) in rb.red:
            v1 += [ip, jp]
        pairs += [(i, ip), (ip, jp), (jp, j)]
    in1 = set(v1)
    arcs = []
    for p, q in pairs:
        if (p in in1) == (q in in1):
            arcs += [(p, q, Fraction(1, 2)), (q, p, Fraction(1, 2))]
        else:
            one, two = (p, q) if p in in1 else (q, p)
            arcs += [(one, two, cw), (two, one, 1 - cw)]
    v2 = [v for v in vs if v not in in1]
    game = PartitionedGame(DirectedGraph(vs, arcs), Partition([v1, v2]))
    return Subdivision(game, ends, cw)


def solve_epm_via_game(rb: RedBlueGraph, k: Optional[int] = None, bound: int = 64) -> Optional[frozenset]:
    """Decide exact perfect matching through a zero-deviation minimal matching.

    In the subdivided game a perfect matching of G with k' red edges becomes
    one where country 1 receives |R| - k' + 2k'(1 - cross weight). The target
    fixes that value at k' = k; any zero-deviation optimum is translated back.
    """
    k = rb.k if k is None else k
    sub = subdivided_game(rb)
    g2 = sub.game.undirected
    nv = len(g2.vertices)
    if nv > bound:
        raise BoundExceeded("solve_epm_via_game", nv, bound)
    if nv == 0:
        return frozenset() if k == 0 else None
    vn = sub.game.grand_value()
    if 2 * vn != nv:  # no perfect matching in G
        return None
    x1 = len(rb.red) - k + 2 * k * (1 - sub.cross_weight)
    m, dev = minimal_matching_bruteforce(sub.game, {"1": x1, "2": vn - x1}, bound=bound)
    if dev != 0:
        return None
    return frozenset(e for e, (ip, _) in sub.ends.items() if g2.key(e[0], ip) in m)


def _perfect_game_parts(game: PartitionedGame) -> tuple[Fraction, frozenset]:
    """Validate the perfect-game shape; return (weight received by country 1 per cross edge, cross edges)."""
    if game.n != 2 or not game.directed or game.uniform:
        raise NotPerfectGame("need a directed two-country game")
    g = game.undirected
    in1 = set(game.partition.classes[0])
    gain1 = None
    cross = []
    for u, v in g.canonical_edges():
        wuv, wvu = game.graph.weight(u, v), game.graph.weight(v, u)
        if wuv + wvu != 1:
            raise NotPerfectGame(f"edge {u}-{v} does not weigh 1")
        if (u in in1) == (v in in1):
            if wuv != Fraction(1, 2):
                raise NotPerfectGame(f"arcs inside a country must weigh 1/2 ({u}-{v})")
            continue
        into1 = wvu if u in in1 else wuv
        if into1 == Fraction(1, 2) or (gain1 is not None and into1 != gain1):
            raise NotPerfectGame("cross arcs must share one split different from 1/2")
        gain1 = into1
        cross.append((u, v))
    if 2 * game.grand_value() != len(g.vertices):
        raise NotPerfectGame("underlying graph has no perfect matching")
    return (gain1 if gain1 is not None else Fraction(2, 3)), frozenset(cross)


def solve_game_via_epm(
    game: PartitionedGame,
    x: Mapping[str, RationalLike],
    delta: RationalLike,
    epm_oracle: Callable[[RedBlueGraph, int], Optional[frozenset]] = lambda rb, k: brute_force_epm(rb, k),
) -> Optional[frozenset]:
    """Optimal matching with |x_p - u_p| <= delta for both countries, via an EPM oracle.

    Cross edges are red. For each red count k the oracle supplies a perfect
    matching with k red edges, whose utilities (gain*k + l_1, (1-gain)*k + l_2)
    are tested against the two intervals; l_p counts matched edges inside
    country p. k = 0 is included.
    """
    gain1, cross = _perfect_game_parts(game)
    g = game.undirected
    rb = RedBlueGraph(Graph(g.vertices, [(u, v, 1) for u, v, _ in g.edges]), cross)
    labels = game.partition.labels
    x1, x2 = to_rational(x[labels[0]]), to_rational(x[labels[1]])
    d = to_rational(delta)
    in1 = set(game.partition.classes[0])
    for k in range(len(cross) + 1):
        m = epm_oracle(rb, k)
        if m is None:
            continue
        l1 = sum(1 for u, v in m if u in in1 and v in in1)
        l2 = sum(1 for u, v in m if u not in in1 and v not in in1)
        if abs(gain1 * k + l1 - x1) <= d and abs((1 - gain1) * k + l2 - x2) <= d:
            return frozenset(g.key(u, v) for u, v in m)
    return None


def gen_epm_instance(n: int, red_density: RationalLike, k: int, seed: int, edge_density: RationalLike = Fraction(1, 2)) -> RedBlueGraph:
    """Random red-blue graph: each pair is an edge w.p. edge_density, red w.p. red_density."""
    rng = np.random.default_rng(seed)
    pe, pr = to_rational(edge_density), to_rational(red_density)
    vs = [str(i) for i in range(1, n + 1)]
    edges, red = [], set()
    for u, v in combinations(vs, 2):
        if rng.integers(pe.denominator) < pe.numerator:
            edges.append((u, v, 1))
            if rng.integers(pr.denominator) < pr.numerator:
                red.add((u, v))
    return RedBlueGraph(Graph(vs, edges), frozenset(red), int(k))
