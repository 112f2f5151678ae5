import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmgames.errors import BoundExceeded
from pmgames.graph import Graph, Partition
from pmgames.matching import (
    Interval,
    LexPair,
    country_counts,
    enumerate_optimal_matchings,
    interval_constrained_optimal_matching,
    is_matching,
    lemma1_extension,
    max_weight_covering_matching,
    max_weight_matching,
    max_weight_perfect_matching,
    optimum_by_enumeration,
)

from oracles import all_matchings, optimal_set, random_graph, random_partition

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=6)
pairs = st.builds(LexPair, rationals, rationals)


@given(pairs, pairs, pairs)
def test_lexpair_group_laws(a, b, c):
    zero = LexPair()
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a + zero == a
    assert a + (-a) == zero
    assert a - b == a + (-b)


@given(pairs, pairs, pairs)
def test_lexpair_order_is_total_and_translation_invariant(a, b, c):
    assert (a < b) + (b < a) + (a == b) == 1
    if a < b:
        assert a + c < b + c
    assert (a < b) == ((a.primary, a.secondary) < (b.primary, b.secondary))


def _weights_of(m, g):
    w = {frozenset(e[:2]): e[2] for e in g.edges}
    return sum((w[frozenset(e)] for e in m), Fraction(0))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000))
def test_max_weight_matching_matches_enumeration(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(0, 9), 0.45, weights=(Fraction(1, 3), Fraction(1, 2), 1, 2, Fraction(7, 3)))
    m, w = max_weight_matching(g)
    best, _ = optimal_set(g)
    assert is_matching(g, m)
    assert w == best == _weights_of(m, g)
    assert optimum_by_enumeration(g) == best


def test_lexpair_weights_prefer_secondary_on_ties():
    g = Graph(["a", "b", "c", "d"], [("a", "b", 1), ("c", "d", 1), ("b", "c", 1)])
    weights = {g.key("a", "b"): LexPair(1, 0), g.key("c", "d"): LexPair(1, -5), g.key("b", "c"): LexPair(2, 3)}
    m, w = max_weight_matching(g, weights)
    assert w == LexPair(2, 3) and m == {g.key("b", "c")}
    weights[g.key("b", "c")] = LexPair(2, -6)
    m, w = max_weight_matching(g, weights)
    assert w == LexPair(2, -5) and len(m) == 2


def test_huge_integer_weights_use_fallback_exactly():
    big = 1 << 70
    g = Graph(["a", "b", "c", "d"], [("a", "b", big), ("c", "d", big), ("b", "c", 2 * big + 1)])
    m, w = max_weight_matching(g)
    assert w == 2 * big + 1 and m == {("b", "c")}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_perfect_matching_matches_enumeration(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.choice([0, 2, 4, 6, 8]), 0.5, weights=(1, 2, 3))
    found = max_weight_perfect_matching(g)
    n = len(g.vertices)
    perfect = [m for m in all_matchings(g.vertices, [e[:2] for e in g.edges]) if 2 * len(m) == n]
    if not perfect:
        assert found is None
        return
    best = max(_weights_of(m, g) for m in perfect)
    m, w = found
    assert 2 * len(m) == n and is_matching(g, m) and w == best


def test_perfect_matching_odd_order_is_none():
    assert max_weight_perfect_matching(Graph(["a", "b", "c"], [("a", "b", 1)])) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_covering_matching_matches_enumeration(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(1, 8), 0.5, weights=(1, 2, 3))
    must = {v for v in g.vertices if rng.random() < 0.4}
    found = max_weight_covering_matching(g, must)
    ok = [m for m in all_matchings(g.vertices, [e[:2] for e in g.edges]) if must <= {v for e in m for v in e}]
    if not ok:
        assert found is None
    else:
        assert found is not None and found[1] == max(_weights_of(m, g) for m in ok)
        assert must <= {v for e in found[0] for v in e}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_enumeration_lists_exactly_the_optimal_set(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(0, 9), 0.45, weights=(1, 2))
    _, expected = optimal_set(g)
    got = list(enumerate_optimal_matchings(g))
    assert len(got) == len(set(got))
    assert {frozenset(frozenset(e) for e in m) for m in got} == set(expected)


def test_enumeration_bound():
    g = Graph([str(i) for i in range(17)])
    with pytest.raises(BoundExceeded):
        list(enumerate_optimal_matchings(g))


def test_interval_integer_bounds():
    assert Interval.closed(Fraction(1, 2), Fraction(7, 2)).integer_bounds(10) == (1, 3)
    assert Interval.open(1, 3).integer_bounds(10) == (2, 2)
    assert Interval.open(1, 2).integer_bounds(10) is None
    assert Interval().integer_bounds(4) == (0, 4)
    assert Interval.point(Fraction(3, 2)).integer_bounds(4) is None
    assert 2 in Interval.closed(2, 2) and 2 not in Interval.open(2, 3)


def test_extension_size_bound():
    g = random_graph(random.Random(3), 9, 0.4)
    part = random_partition(random.Random(3), g.vertices, 3)
    bounds = [(0, len(c)) for c in part.classes]
    for literal in (True, False):
        ext = lemma1_extension(g, part, bounds, literal=literal)
        assert len(ext.graph.vertices) <= 2 * len(g.vertices) + 1


def _feasible_by_scan(g, part, ivs):
    _, ms = optimal_set(g, uniform=True)
    owner = part.owner
    for m in ms:
        s = [0] * part.n
        for e in m:
            for v in e:
                s[owner[v]] += 1
        if all(si in iv for si, iv in zip(s, ivs)):
            return True
    return False


def _random_interval(rng, size):
    lo = Fraction(rng.randint(-1, 2 * size + 1), 2)
    hi = lo + Fraction(rng.randint(0, 2 * size), 2)
    return Interval(lo, hi, rng.random() < 0.3, rng.random() < 0.3)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000))
def test_interval_constrained_matches_scan(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(1, 10), 0.35)
    part = random_partition(rng, g.vertices, rng.randint(1, 4))
    ivs = [_random_interval(rng, len(c)) for c in part.classes]
    unit = {g.key(u, v): Fraction(1) for u, v, _ in g.edges}
    expected = _feasible_by_scan(g, part, ivs)
    for literal in (False, True):
        m = interval_constrained_optimal_matching(g, part, ivs, unit, literal=literal)
        assert (m is not None) == expected
        if m is not None:
            assert len(m) == optimal_set(g, uniform=True)[0]
            assert all(s in iv for s, iv in zip(country_counts(part, m), ivs))


def test_interval_constraints_by_label():
    g = Graph(["a", "b", "c", "d"], [("a", "b", 1), ("c", "d", 1), ("b", "c", 1)])
    part = Partition([["a", "b"], ["c", "d"]], ["x", "y"])
    unit = {g.key(u, v): Fraction(1) for u, v, _ in g.edges}
    assert interval_constrained_optimal_matching(g, part, {"x": Interval.point(2)}, unit) is not None
    assert interval_constrained_optimal_matching(g, part, {"x": Interval.point(1)}, unit) is None
