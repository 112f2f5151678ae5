import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmgames.errors import BoundExceeded, NotBipartite, NotPerfectGame
from pmgames.games import PartitionedGame, country_utilities
from pmgames.graph import DirectedGraph, Graph, Partition
from pmgames.hardness import (
    CompactCycles,
    RedBlueGraph,
    bipartite_to_nearly3regular,
    brute_force_epm,
    enumerate_perfect_matchings,
    expand_cycles,
    find_3regular_subgraph,
    find_nearly3regular_subgraph,
    gen_3partition_instance,
    gen_compact_cycle_instance,
    gen_epm_instance,
    gen_nearly3regular_bgame,
    gen_partition_instance,
    has_3partition,
    has_even_split,
    nearly3regular_allocation,
    recompact_cycles,
    solve_epm_via_game,
    solve_game_via_epm,
    subdivided_game,
)
from pmgames.lexmin import minimal_matching_bruteforce
from pmgames.matching import enumerate_optimal_matchings

from oracles import b_matching_value

F = Fraction


def _subset_sum_split(a):
    total = sum(a)
    return total % 2 == 0 and any(
        2 * sum(c) == total for r in range(len(a) + 1) for c in combinations(a, r)
    )


# -- partition gadget ---------------------------------------------------------

@pytest.mark.parametrize("a, worst", [((1, 1), 0), ((1, 1, 1), F(1, 2)), ((2,), 1), ((1, 2, 3), 0)])
def test_partition_examples(a, worst):
    inst = gen_partition_instance(a)
    assert len(inst.game.graph.vertices) == 3 * len(a)
    assert inst.target == {"1": F(3 * sum(a), 2), "2": F(sum(a), 2)}
    assert minimal_matching_bruteforce(inst.game, inst.target, bound=30)[1] == worst


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=5))
def test_partition_zero_deviation_iff_even_split(a):
    inst = gen_partition_instance(a)
    _, worst = minimal_matching_bruteforce(inst.game, inst.target, bound=30)
    assert (worst == 0) == _subset_sum_split(a) == has_even_split(a)


def test_partition_rejects_bad_input():
    with pytest.raises(ValueError):
        gen_partition_instance([])
    with pytest.raises(ValueError):
        gen_partition_instance([0, 1])


# -- 3-partition gadget -------------------------------------------------------

def test_3partition_structure():
    with pytest.raises(ValueError):
        gen_3partition_instance((2, 2, 2), 5)  # sum mismatch
    with pytest.raises(ValueError):
        gen_3partition_instance((1, 2, 3), 6)  # 1 <= c/4
    a, c = (3, 3, 4, 3, 3, 4), 10
    inst = gen_3partition_instance(a, c)
    k = 2
    internal = sum(3 * (2 * aq - 2) for aq in a) * k
    assert len(inst.game.graph.vertices) == 6 * k + internal
    assert inst.game.n == k + 1
    assert inst.meta["L"] == k * c + 1
    assert inst.target[str(k + 1)] == 3 * k * (k * c + 2)


def test_3partition_yes_instance_k1():
    inst = gen_3partition_instance((2, 2, 2), 6)
    m, worst = minimal_matching_bruteforce(inst.game, inst.target, bound=30)
    assert worst == 0
    assert len(m) == len(inst.game.graph.vertices) // 2


@pytest.mark.slow
def test_3partition_yes_instance_k2():
    inst = gen_3partition_instance((2,) * 6, 6)
    assert minimal_matching_bruteforce(inst.game, inst.target, bound=100)[1] == 0


def test_has_3partition():
    assert has_3partition((4, 4, 5, 4, 4, 5), 13)
    assert not has_3partition((4, 4, 4, 4, 4, 6), 13)
    assert not has_3partition((1, 2), 3)


# -- compact cycles -----------------------------------------------------------

@pytest.mark.parametrize("a", [3, 5])
def test_single_cycle_closed_forms(a):
    inst = gen_compact_cycle_instance([a])
    L = inst.meta["L"]
    game = expand_cycles(inst.game)
    assert len(game.graph.vertices) == 4 * a + 4
    ms = list(enumerate_optimal_matchings(game.undirected, game.weights, bound=64))
    assert len(ms) == 2
    low, high = L * (a + 1) + F(1, 2), L * (a + 1) + F(1, 2) + a
    first = "C1.0", "C1.1"  # the edge e
    for m in ms:
        u = country_utilities(game, m)
        if game.undirected.key(*first) in m:
            assert (u["1"], u["2"]) == (low, high)
        else:
            assert (u["1"], u["2"]) == (high, low)


@pytest.mark.parametrize("a", [(1, 1), (1, 2), (1, 1, 2), (2, 3, 5)])
def test_cycles_zero_deviation_iff_even_split(a):
    inst = gen_compact_cycle_instance(a)
    game = expand_cycles(inst.game)
    _, worst = minimal_matching_bruteforce(game, inst.target, bound=100)
    assert (worst == 0) == has_even_split(a)


def test_cycle_normalization_and_roundtrip():
    inst = gen_compact_cycle_instance([1, 2, 3], normalize=True)
    a = inst.meta["a"]
    assert len(a) == 4 and all(v % 2 == 1 for v in a)
    assert inst.meta["L"] == sum(a) + 1
    assert recompact_cycles(expand_cycles(inst.game)) == inst.game
    assert CompactCycles.from_json(inst.game.to_json()) == inst.game
    with pytest.raises(ValueError):
        gen_compact_cycle_instance([3], L=3)


def test_normalization_preserves_answer():
    for a in ([1, 1], [1, 2], [2, 2, 4]):
        inst = gen_compact_cycle_instance(a, normalize=True)
        assert has_even_split(inst.meta["a"]) == has_even_split(a)


# -- nearly 3-regular ---------------------------------------------------------

def _five_vertex_graph():
    return Graph(["1", "2", "3", "4", "5"],
                 [("1", "3", 1), ("1", "4", 1), ("2", "3", 1), ("2", "4", 1), ("3", "4", 1),
                  ("1", "5", 1), ("2", "5", 1)])


def test_nearly3regular_blocking_coalition():
    g = _five_vertex_graph()
    game = gen_nearly3regular_bgame(g)
    x = nearly3regular_allocation(g)
    assert len(game.players) == 13 * 5 + 1
    assert sum(x.values()) == game.grand_value() == 15 * 5
    sub = find_nearly3regular_subgraph(g)
    assert sub is not None and len(sub) == 7
    coalition = sorted({v for e in sub for v in e}) + ["r"]
    value = game.value(coalition)
    assert value == b_matching_value(game.graph, game.capacities, coalition) == 8
    assert value > sum(x[p] for p in coalition)


def test_nearly3regular_absent_in_path_and_k4():
    path = Graph(list("abcd"), [("a", "b", 1), ("b", "c", 1), ("c", "d", 1)])
    assert find_nearly3regular_subgraph(path) is None
    k4 = Graph(list("abcd"), [(u, v, 1) for u, v in combinations("abcd", 2)])
    assert find_nearly3regular_subgraph(k4) is None  # needs an odd vertex count
    assert find_3regular_subgraph(k4) is not None
    game = gen_nearly3regular_bgame(path)
    assert sum(nearly3regular_allocation(path).values()) == game.grand_value()


def test_bipartite_to_nearly3regular():
    with pytest.raises(NotBipartite):
        bipartite_to_nearly3regular(Graph(list("abc"), [("a", "b", 1), ("b", "c", 1), ("a", "c", 1)]))
    k33 = Graph(["a1", "a2", "a3", "b1", "b2", "b3"],
                [(f"a{i}", f"b{j}", 1) for i in (1, 2, 3) for j in (1, 2, 3)])
    h = bipartite_to_nearly3regular(k33)
    assert len(h.vertices) == 9 * 7 and len(h.edges) == 9 * 10
    assert find_3regular_subgraph(k33) is not None
    comp = Graph([v for v in h.vertices if v.endswith("#1")],
                 [e for e in h.edges if e[0].endswith("#1")])
    assert find_nearly3regular_subgraph(comp) is not None


# -- exact perfect matching ---------------------------------------------------

def _k4():
    g = Graph(["1", "2", "3", "4"], [(u, v, 1) for u, v in combinations("1234", 2)])
    return RedBlueGraph(g, frozenset({("1", "2"), ("3", "4")}))


def test_k4_examples():
    rb = _k4()
    assert brute_force_epm(rb, 0) is not None
    assert brute_force_epm(rb, 1) is None
    assert brute_force_epm(rb, 2) == frozenset({("1", "2"), ("3", "4")})
    for k in range(3):
        assert (solve_epm_via_game(rb, k) is None) == (brute_force_epm(rb, k) is None)
    assert RedBlueGraph.from_json(rb.to_json()) == rb


def test_subdivided_game_is_perfect():
    sub = subdivided_game(_k4())
    assert len(sub.game.graph.vertices) == 4 + 2 * 6
    assert sub.game.grand_value() == 8
    with pytest.raises(ValueError):
        subdivided_game(_k4(), cross_weight=F(1, 2))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 8), st.sampled_from([F(1, 3), F(1, 2), F(2, 3)]))
def test_epm_via_game_agrees(seed, n, red):
    rb = gen_epm_instance(n, red, 0, seed)
    if len(subdivided_game(rb).game.graph.vertices) > 40:
        return
    for k in range(len(rb.red) + 1):
        found = solve_epm_via_game(rb, k)
        expected = brute_force_epm(rb, k)
        assert (found is None) == (expected is None)
        if found is not None:
            assert sum(1 for e in found if e in rb.red) == k
            assert found in set(enumerate_perfect_matchings(rb.graph))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 6), st.sampled_from([F(0), F(1, 2), F(1)]))
def test_game_via_epm_agrees(seed, x1, delta):
    rng = random.Random(seed)
    rb = gen_epm_instance(rng.choice([4, 6]), F(1, 2), 0, seed, edge_density=F(2, 3))
    sub = subdivided_game(rb)
    game = sub.game
    if not game.undirected.edges or 2 * game.grand_value() != len(game.graph.vertices):
        with pytest.raises(NotPerfectGame):
            solve_game_via_epm(game, {"1": 0, "2": 0}, 0)
        return
    total = game.grand_value()
    x = {"1": F(x1, 3), "2": total - F(x1, 3)}
    found = solve_game_via_epm(game, x, delta, lambda g, k: brute_force_epm(g, k, bound=40))
    _, worst = minimal_matching_bruteforce(game, x, bound=40)
    assert (found is not None) == (worst <= delta)
    if found is not None:
        u = country_utilities(game, found)
        assert max(abs(x[p] - u[p]) for p in ("1", "2")) <= delta


def test_perfect_game_validation():
    g = DirectedGraph(["a", "b"], [("a", "b", 1), ("b", "a", 1)])
    with pytest.raises(NotPerfectGame):
        solve_game_via_epm(PartitionedGame(g, Partition([["a"], ["b"]])), {"1": 1, "2": 1}, 0)


def test_epm_generator_is_deterministic():
    assert gen_epm_instance(8, F(1, 2), 2, 7) == gen_epm_instance(8, F(1, 2), 2, 7)
    with pytest.raises(BoundExceeded):
        brute_force_epm(gen_epm_instance(18, F(1, 2), 0, 1))
