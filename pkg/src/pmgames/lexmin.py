"""Lexicographically minimal and minimal maximum-weight matchings.

Given a target x, a matching M in the optimal set has deviation vector
d(M): the values |x_p - r_p(M)| sorted non-increasingly, where r_p is s_p
(kidney count) for uniform games and u_p (received weight) otherwise.

* :func:`lexmin_uniform` fixes one deviation level at a time. Every
  feasibility question it asks is answered by interval-constrained
  matching, branching over the two sides of a country already fixed at
  a positive level.
* :func:`lexmin_width1_directed` solves the width-1 directed case with
  one perfect matching under two-component weights.
* The ``*_bruteforce`` functions scan the enumerated optimal set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

from .errors import BranchBudgetExceeded, WidthError
from .games import PartitionedGame, received
from .graph import Edge, Graph
from .matching import (
    DEFAULT_ENUMERATION_BOUND,
    Interval,
    IntervalSolver,
    LexPair,
    _fresh_namer,
    enumerate_optimal_matchings,
    max_weight_perfect_matching,
)
from .rational import RationalLike, to_rational

BRANCH_BUDGET = 1 << 12

Deviation = tuple  # tuple[Fraction, ...], non-increasing


@dataclass(frozen=True)
class LevelStructure:
    levels: tuple[Fraction, ...]  # strictly decreasing
    classes: tuple[tuple[str, ...], ...]  # players fixed at each level


class LexMinResult(NamedTuple):
    matching: frozenset
    levels: LevelStructure
    deviation: Deviation


def _targets(game: PartitionedGame, x: Mapping[str, RationalLike]) -> dict[str, Fraction]:
    missing = [p for p in game.players if p not in x]
    if missing:
        raise KeyError(f"no target for player {missing[0]}")
    return {p: to_rational(x[p]) for p in game.players}


def deviation_vector(game: PartitionedGame, m: Iterable[Edge], x: Mapping[str, RationalLike]) -> Deviation:
    """|x_p - r_p(M)| sorted non-increasingly (r = s for uniform games, else u)."""
    x = _targets(game, x)
    r = received(game, m)
    return tuple(sorted((abs(x[p] - r[p]) for p in game.players), reverse=True))


# -- feasibility over admissible count sets ---------------------------------

def _runs(values: Sequence[int]) -> list[tuple[int, int]]:
    """Split sorted distinct integers into maximal runs of consecutive values."""
    out: list[tuple[int, int]] = []
    for v in values:
        if out and out[-1][1] + 1 == v:
            out[-1] = (out[-1][0], v)
        else:
            out.append((v, v))
    return out


class FeasibilityProber:
    """Answers "is there M in the optimal set with s_p(M) in A_p for all p?".

    Each admissible set A_p is a set of integers. Sets made of one run go to
    the interval solver directly; sets with several runs (the two sides of a
    finished country) are branched over, after a relaxation to the hull of
    every set has succeeded.
    """

    def __init__(self, game: PartitionedGame, budget: int = BRANCH_BUDGET):
        self.game = game
        self.sizes = [len(c) for c in game.partition.classes]
        self.solver = IntervalSolver(game.undirected, game.partition, game.weights)
        self.budget = budget
        self._memo: dict[tuple, Optional[frozenset]] = {}

    def _bounds(self, bounds: tuple[tuple[int, int], ...]) -> Optional[frozenset]:
        if bounds not in self._memo:
            self._memo[bounds] = self.solver.solve_bounds(bounds)
        return self._memo[bounds]

    def probe(self, sets: Sequence[Iterable[int]]) -> Optional[frozenset]:
        runs = []
        for size, allowed in zip(self.sizes, sets):
            vals = sorted({int(s) for s in allowed if 0 <= s <= size})
            if not vals:
                return None
            runs.append(_runs(vals))
        branches = [0]

        def search(chosen: list[tuple[int, int]], k: int) -> Optional[frozenset]:
            hull = tuple(chosen[:k] + [(r[0][0], r[-1][1]) for r in runs[k:]])
            found = self._bounds(hull)
            if found is None:
                return None
            while k < len(runs) and len(runs[k]) == 1:
                chosen.append(runs[k][0])
                k += 1
            if k == len(runs):
                return found
            for run in runs[k]:
                branches[0] += 1
                if branches[0] > self.budget:
                    raise BranchBudgetExceeded(f"more than {self.budget} side assignments")
                hit = search(chosen + [run], k + 1)
                if hit is not None:
                    return hit
            return None

        return search([], 0)


def _within(x: Fraction, size: int, d: Fraction, strict: bool) -> list[int]:
    """Integers s in [0, size] with |x - s| <= d (or < d)."""
    lo = max(0, math.ceil(x - d))
    hi = min(size, math.floor(x + d))
    return [s for s in range(lo, hi + 1) if (abs(x - s) < d if strict else abs(x - s) <= d)]


def _exactly(x: Fraction, size: int, d: Fraction) -> list[int]:
    return sorted({s for s in (x - d, x + d) if s.denominator == 1 and 0 <= s <= size})


def feasibility_probe(
    game: PartitionedGame,
    constraints: Mapping[str, Union[Interval, Iterable[int]]],
    budget: int = BRANCH_BUDGET,
) -> Optional[frozenset]:
    """M in the optimal set with s_p(M) admissible for every constrained player, or None.

    A constraint is an :class:`Interval` or an explicit set of counts;
    unconstrained players may take any count.
    """
    sets = []
    for lab, cls in zip(game.partition.labels, game.partition.classes):
        c = constraints.get(lab)
        if c is None:
            sets.append(range(len(cls) + 1))
        elif isinstance(c, Interval):
            nb = c.integer_bounds(len(cls))
            sets.append(range(nb[0], nb[1] + 1) if nb else ())
        else:
            sets.append(list(c))
    return FeasibilityProber(game, budget).probe(sets)


# -- Lex-Min ----------------------------------------------------------------

def lexmin_uniform(
    game: PartitionedGame, x: Mapping[str, RationalLike], budget: int = BRANCH_BUDGET
) -> LexMinResult:
    """Lexicographically minimal matching of a uniform game for target ``x`` (s-scale).

    Each round finds the least deviation bound d that the unfinished
    countries can jointly meet (binary search over the finitely many
    candidate values), then fixes the countries that cannot be pushed
    strictly below it. Countries are tried in player order; those that can
    be pushed below stay unfinished.
    """
    if not game.uniform:
        raise ValueError("lexmin_uniform needs a uniform game; use lexmin_bruteforce otherwise")
    x = _targets(game, x)
    players = game.players
    sizes = {p: len(c) for p, c in zip(players, game.partition.classes)}
    prober = FeasibilityProber(game, budget)
    fixed: dict[str, Fraction] = {}
    levels: list[Fraction] = []
    classes: list[tuple[str, ...]] = []
    witness: Optional[frozenset] = None

    def sets(bound: Fraction, strict: set[str]) -> list[list[int]]:
        out = []
        for p in players:
            if p in fixed:
                out.append(_exactly(x[p], sizes[p], fixed[p]))
            else:
                out.append(_within(x[p], sizes[p], bound, p in strict))
        return out

    while len(fixed) < len(players):
        open_ = [p for p in players if p not in fixed]
        cands = sorted({abs(x[p] - s) for p in open_ for s in range(sizes[p] + 1)})
        lo, hi = 0, len(cands) - 1
        best = None
        while lo <= hi:
            mid = (lo + hi) // 2
            m = prober.probe(sets(cands[mid], set()))
            if m is not None:
                best, hi = (mid, m), mid - 1
            else:
                lo = mid + 1
        if best is None:  # cannot happen: the previous witness meets the largest candidate
            raise RuntimeError("no feasible deviation level")
        d = cands[best[0]]
        witness = best[1]
        strict: set[str] = set()
        for p in open_:
            m = prober.probe(sets(d, strict | {p}))
            if m is not None:
                strict.add(p)
                witness = m
        level_class = tuple(p for p in open_ if p not in strict)
        for p in level_class:
            fixed[p] = d
        levels.append(d)
        classes.append(level_class)

    assert witness is not None or not players
    m = witness if witness is not None else frozenset()
    return LexMinResult(m, LevelStructure(tuple(levels), tuple(classes)), deviation_vector(game, m, x))


# -- width-1 directed games -------------------------------------------------

def _arc_weight(game: PartitionedGame, donor: str, patient: str) -> Fraction:
    """Utility of the transplant donor -> patient inside a 2-way exchange, 0 if none."""
    if not game.undirected.has_edge(donor, patient):
        return Fraction(0)
    if game.directed:
        return game.graph.weight(donor, patient)
    return game.weights[game.undirected.key(donor, patient)] / 2


def lexmin_width1_directed(game: PartitionedGame, x: Mapping[str, RationalLike]) -> frozenset:
    """Lexicographically minimal maximum-weight matching of a width-1 game.

    The graph is closed to a complete graph with zero-weight padding (plus a
    dummy vertex with target 0 when the order is odd). Edge pq gets the pair
    (w_pq + w_qp, -B^rank(d_pq) - B^rank(d_qp)) where d_pq = |x_p - w_qp| and
    ranks are dense over the distinct d values. With B above the number of
    summed terms, the largest differing rank decides every comparison, so a
    maximum perfect matching under these pairs is lexicographically minimal.
    """
    if game.partition.width > 1:
        raise WidthError("lexmin_width1_directed needs a width-1 game")
    if game.uniform:
        raise ValueError("uniform games are handled by lexmin_uniform")
    x = _targets(game, x)
    owner = game.partition.owner
    labels = game.partition.labels
    vs = list(game.undirected.vertices)
    tx = {v: x[labels[owner[v]]] for v in vs}
    dummy = None
    if len(vs) % 2:
        dummy = _fresh_namer(vs)("dummy")
        vs.append(dummy)
        tx[dummy] = Fraction(0)

    def arc(p: str, q: str) -> Fraction:
        if dummy in (p, q):
            return Fraction(0)
        return _arc_weight(game, p, q)

    n = len(vs)
    if n == 0:
        return frozenset()
    delta = {(p, q): abs(tx[p] - arc(q, p)) for p in vs for q in vs if p != q}
    rank = {d: r for r, d in enumerate(sorted(set(delta.values())))}
    base = 2 * n * (n - 1) + 1
    closure = Graph(vs, [(p, q, 0) for p, q in combinations(vs, 2)])
    weights = {}
    for p, q in combinations(vs, 2):
        weights[closure.key(p, q)] = LexPair(
            arc(p, q) + arc(q, p),
            -(base ** rank[delta[(p, q)]]) - base ** rank[delta[(q, p)]],
        )
    found = max_weight_perfect_matching(closure, weights)
    assert found is not None  # complete graph of even order
    g = game.undirected
    return frozenset(g.key(p, q) for p, q in found[0] if dummy not in (p, q) and g.has_edge(p, q))


# -- brute force --------------------------------------------------------------

def lexmin_bruteforce(
    game: PartitionedGame, x: Mapping[str, RationalLike], bound: int = DEFAULT_ENUMERATION_BOUND
) -> tuple[frozenset, Deviation]:
    """Scan the optimal set for the lexicographically smallest deviation vector."""
    x = _targets(game, x)
    best = None
    for m in enumerate_optimal_matchings(game.undirected, game.weights, bound):
        d = deviation_vector(game, m, x)
        if best is None or d < best[1]:
            best = (m, d)
    return best


def minimal_matching_bruteforce(
    game: PartitionedGame, x: Mapping[str, RationalLike], bound: int = DEFAULT_ENUMERATION_BOUND
) -> tuple[frozenset, Fraction]:
    """Matching in the optimal set minimizing the largest deviation, with that value."""
    x = _targets(game, x)
    best = None
    for m in enumerate_optimal_matchings(game.undirected, game.weights, bound):
        r = received(game, m)
        worst = max((abs(x[p] - r[p]) for p in game.players), default=Fraction(0))
        if best is None or worst < best[1]:
            best = (m, worst)
            if worst == 0:
                break
    return best
