"""Game transformations between b-matching games and partitioned matching games.

``tutte_expansion`` turns capacities into classes of vertex copies (width
b*). ``root_gadget`` turns classes into capacitated root vertices. Each comes
with an allocation lift, an inverse projection and a lift of balanced
certificates, so core questions can be moved across in either direction.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import CapacityViolated, EdgeNotInGraph, WidthError
from .games import Allocation, BMatchingGame, PartitionedGame, check_allocation
from .graph import Edge, Graph, Partition
from .matching import _fresh_namer
from .rational import RationalLike, to_rational

Certificate = dict  # frozenset of players -> Fraction


@dataclass(frozen=True)
class TutteExpansion:
    source: BMatchingGame
    result: PartitionedGame
    vertex_class: dict  # source vertex -> class label
    edge_class: dict  # canonical source edge -> class label
    copies: dict  # source vertex -> tuple of copy vertices
    edge_ends: dict  # canonical source edge (i, j) -> (i_j, j_i)


def tutte_expansion(game: BMatchingGame) -> TutteExpansion:
    """Replace vertex i by b(i) copies and edge ij by a weighted path i_j j_i.

    Every edge of the expansion (copy to i_j, i_j to j_i, j_i to copy) carries
    w(ij). Classes are V_i (labelled i) and E_ij (labelled ``E(i,j)``).
    """
    g = game.graph
    fresh = _fresh_namer(())
    labels = _fresh_namer(())
    vertices: list[str] = []
    classes: list[list[str]] = []
    class_labels: list[str] = []
    copies: dict[str, tuple[str, ...]] = {}
    vertex_class: dict[str, str] = {}
    for i in g.vertices:
        cs = tuple(fresh(f"{i}^{h}") for h in range(1, game.capacities[i] + 1))
        copies[i] = cs
        vertices.extend(cs)
        classes.append(list(cs))
        vertex_class[i] = labels(i)
        class_labels.append(vertex_class[i])
    edges: list[tuple[str, str, Fraction]] = []
    edge_class: dict[Edge, str] = {}
    edge_ends: dict[Edge, tuple[str, str]] = {}
    for u, v, w in g.edges:
        i, j = g.key(u, v)
        ij, ji = fresh(f"{i}_{j}"), fresh(f"{j}_{i}")
        vertices.extend((ij, ji))
        edge_ends[(i, j)] = (ij, ji)
        edge_class[(i, j)] = labels(f"E({i},{j})")
        classes.append([ij, ji])
        class_labels.append(edge_class[(i, j)])
        edges.append((ij, ji, w))
        edges.extend((c, ij, w) for c in copies[i])
        edges.extend((ji, c, w) for c in copies[j])
    result = PartitionedGame(Graph(vertices, edges), Partition(classes, class_labels))
    return TutteExpansion(game, result, vertex_class, edge_class, copies, edge_ends)


def _check_b_matching(game: BMatchingGame, m: Iterable[Edge]) -> list[Edge]:
    g = game.graph
    out = []
    load: Counter = Counter()
    for u, v in m:
        if not g.has_edge(u, v):
            raise EdgeNotInGraph(f"{u}-{v}")
        e = g.key(u, v)
        out.append(e)
        load[u] += 1
        load[v] += 1
    if len(set(out)) != len(out):
        raise CapacityViolated("edge listed twice")
    for x, k in load.items():
        if k > game.capacities[x]:
            raise CapacityViolated(f"vertex {x} meets {k} edges, capacity {game.capacities[x]}")
    return out


def transform_b_matching(exp: TutteExpansion, m: Iterable[Edge]) -> frozenset:
    """Matching of the expansion representing b-matching ``m``.

    Edges of ``m`` send both gadget ends to the lowest-index free copies;
    other edges match their two gadget vertices to each other.
    """
    src = exp.source
    chosen = set(_check_b_matching(src, m))
    used: Counter = Counter()
    rg = exp.result.undirected
    out = []
    for u, v, _ in src.graph.edges:
        i, j = src.graph.key(u, v)
        ij, ji = exp.edge_ends[(i, j)]
        if (i, j) in chosen:
            out.append(rg.key(exp.copies[i][used[i]], ij))
            out.append(rg.key(ji, exp.copies[j][used[j]]))
            used[i] += 1
            used[j] += 1
        else:
            out.append(rg.key(ij, ji))
    return frozenset(out)


def lift_allocation_b2p(exp: TutteExpansion, x: Mapping[str, RationalLike]) -> Allocation:
    """V_i receives x_i and E_ij receives w(ij)."""
    x = check_allocation(exp.source, x)
    out = {exp.vertex_class[i]: x[i] for i in exp.source.graph.vertices}
    for u, v, w in exp.source.graph.edges:
        out[exp.edge_class[exp.source.graph.key(u, v)]] = w
    return out


def project_allocation_b2p(exp: TutteExpansion, xbar: Mapping[str, RationalLike]) -> Allocation:
    """Inverse of :func:`lift_allocation_b2p` on the vertex classes."""
    return {i: to_rational(xbar[exp.vertex_class[i]]) for i in exp.source.graph.vertices}


def lift_certificate_b2p(exp: TutteExpansion, lam: Mapping[Iterable[str], RationalLike]) -> Certificate:
    """Balanced weights on the expansion from balanced weights on the source.

    S maps to the classes of its vertices and internal edges; each singleton
    edge class absorbs the remaining weight 1 - sum of lambda(S) over S
    containing the edge.
    """
    g = exp.source.graph
    out: Certificate = {}
    cover = {e: Fraction(0) for e in exp.edge_class}
    for s, weight in lam.items():
        s = frozenset(s)
        weight = to_rational(weight)
        inner = [e for e in exp.edge_class if e[0] in s and e[1] in s]
        key = frozenset([exp.vertex_class[i] for i in s] + [exp.edge_class[e] for e in inner])
        out[key] = out.get(key, Fraction(0)) + weight
        for e in inner:
            cover[e] += weight
    for u, v, _ in g.edges:
        e = g.key(u, v)
        rest = 1 - cover[e]
        if rest:
            key = frozenset([exp.edge_class[e]])
            out[key] = out.get(key, Fraction(0)) + rest
    return out


@dataclass(frozen=True)
class RootGadget:
    source: PartitionedGame
    result: BMatchingGame
    root_of: dict  # class label -> root vertex
    root_weight: Fraction
    zero_weight_roots: bool  # v(N) = 0 makes every root edge weightless


def root_gadget(game: PartitionedGame) -> RootGadget:
    """Add one root per class, joined to the class with weight 2v(N).

    Original vertices get capacity 2 and root r_i gets capacity |V_i|.
    """
    if game.partition.width < 2:
        raise WidthError("root gadget needs width at least 2; a width-1 game is already a matching game")
    g = game.undirected
    vn = game.grand_value()
    heavy = 2 * vn
    fresh = _fresh_namer(g.vertices)
    roots = {lab: fresh(f"r_{lab}") for lab in game.partition.labels}
    edges = [(u, v, game.weights[g.key(u, v)]) for u, v, _ in g.edges]
    for lab, cls in zip(game.partition.labels, game.partition.classes):
        edges.extend((roots[lab], u, heavy) for u in cls)
    caps = {u: 2 for u in g.vertices}
    for lab, cls in zip(game.partition.labels, game.partition.classes):
        caps[roots[lab]] = len(cls)
    result = BMatchingGame(Graph(list(g.vertices) + list(roots.values()), edges), caps)
    return RootGadget(game, result, roots, heavy, vn == 0)


def lift_allocation_p2b(gadget: RootGadget, x: Mapping[str, RationalLike]) -> Allocation:
    """Vertex u of V_i gets x_i/|V_i| + v(N); root r_i gets v(N)|V_i|."""
    src = gadget.source
    x = check_allocation(src, x)
    vn = src.grand_value()
    out: Allocation = {}
    for lab, cls in zip(src.partition.labels, src.partition.classes):
        for u in cls:
            out[u] = x[lab] / len(cls) + vn
        out[gadget.root_of[lab]] = vn * len(cls)
    return out


def project_allocation_p2b(gadget: RootGadget, xbar: Mapping[str, RationalLike]) -> Allocation:
    """x_i = xbar(V_i + r_i) - 2v(N)|V_i|.

    Inverts :func:`lift_allocation_p2b`, and maps every core point of the
    gadget into the core of the source, since coalition values shift by
    exactly 2v(N)|V_i| per included class.
    """
    src = gadget.source
    vn = src.grand_value()
    out = {}
    for lab, cls in zip(src.partition.labels, src.partition.classes):
        total = sum((to_rational(xbar[u]) for u in cls), to_rational(xbar[gadget.root_of[lab]]))
        out[lab] = total - 2 * vn * len(cls)
    return out


def lift_certificate_p2b(gadget: RootGadget, lam: Mapping[Iterable[str], RationalLike]) -> Certificate:
    """S maps to the union of its classes and their roots, with the same weight."""
    src = gadget.source
    out: Certificate = {}
    for s, weight in lam.items():
        members = []
        for lab in s:
            members.extend(src.partition.members(lab))
            members.append(gadget.root_of[lab])
        key = frozenset(members)
        out[key] = out.get(key, Fraction(0)) + to_rational(weight)
    return out


def coalition_image_p2b(gadget: RootGadget, s: Iterable[str]) -> frozenset:
    members = []
    for lab in s:
        members.extend(gadget.source.partition.members(lab))
        members.append(gadget.root_of[lab])
    return frozenset(members)


def coalition_image_b2p(exp: TutteExpansion, s: Iterable[str]) -> frozenset:
    s = set(s)
    out = {exp.vertex_class[i] for i in s}
    out.update(lab for (i, j), lab in exp.edge_class.items() if i in s and j in s)
    return frozenset(out)
