import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmgames import lp
from pmgames.core import (
    certificate_from_json,
    certificate_to_json,
    check_core_membership,
    core_is_empty,
    find_balanced_certificate,
    find_core_allocation,
    most_violated_coalition,
    verify_balanced_certificate,
)
from pmgames.errors import BoundExceeded, NotAnAllocation, UnbalancedCertificate
from pmgames.games import PartitionedGame
from pmgames.graph import Graph, Partition
from pmgames.instances import load_game

from oracles import all_coalitions, in_core, random_graph, random_partition

F = Fraction
FIG1_X = {"1": F(1, 2), "2": F(3, 2), "3": F(3, 2), "4": F(1), "5": F(2), "6": F(1, 2)}


def test_fig1_allocation_in_core(fixture_path):
    game = load_game(fixture_path("fig1.json"))
    assert check_core_membership(game, FIG1_X) is None
    assert check_core_membership(game, FIG1_X, fast=False) is None


def test_fig1_blocked_allocation(fixture_path):
    game = load_game(fixture_path("fig1.json"))
    x = dict(FIG1_X, **{"4": F(0), "6": F(3, 2)})
    block = check_core_membership(game, x)
    assert block is not None and block.excess > 0
    assert set(block.players) == {"4", "5"} and block.value == 3 and block.allocated == 2
    assert check_core_membership(game, x, fast=False).excess == block.excess


def test_triangle_blocking_pair_and_empty_core(fixture_path):
    game = load_game(fixture_path("triangle.json"))
    third = {p: F(1, 3) for p in game.players}
    block = check_core_membership(game, third)
    assert block.players == ("1", "2") and block.value == 1 and block.allocated == F(2, 3)
    assert core_is_empty(game)
    lam = find_balanced_certificate(game)
    assert lam == {frozenset(s): F(1, 2) for s in (("1", "2"), ("1", "3"), ("2", "3"))}
    check = verify_balanced_certificate(game, lam)
    assert check.certifies_empty and check.weighted_value == F(3, 2) and check.grand_value == 1


def test_fig5_core_point(fixture_path):
    game = load_game(fixture_path("fig5.json"))
    x = find_core_allocation(game)
    assert x == {"1": 2, "2": 3, "3": 2}
    assert find_balanced_certificate(game) is None


def test_membership_rejects_non_allocation(fixture_path):
    game = load_game(fixture_path("fig1.json"))
    with pytest.raises(NotAnAllocation):
        check_core_membership(game, dict(FIG1_X, **{"1": F(1)}))


def test_unbalanced_certificate_names_first_player(fixture_path):
    game = load_game(fixture_path("triangle.json"))
    lam = {("1", "2"): F(1, 2), ("2", "3"): F(1, 2), ("1", "3"): F(1, 4)}
    with pytest.raises(UnbalancedCertificate) as info:
        verify_balanced_certificate(game, lam)
    assert info.value.player == "1" and info.value.total == F(3, 4)
    with pytest.raises(ValueError):
        verify_balanced_certificate(game, {("1",): F(2)})


def test_singletons_certificate_never_certifies(fixture_path):
    game = load_game(fixture_path("fig1.json"))
    check = verify_balanced_certificate(game, {(p,): 1 for p in game.players})
    assert not check.certifies_empty and check.weighted_value == 0


def test_certificate_json_round_trip():
    lam = {frozenset({"1", "2"}): F(1, 2), frozenset({"3"}): F(1)}
    data = certificate_to_json(lam, ["1", "2", "3"])
    assert data == {"lambda": [{"players": ["1", "2"], "weight": "1/2"}, {"players": ["3"], "weight": "1"}]}
    assert certificate_from_json(data) == lam


def _random_game(rng):
    g = random_graph(rng, rng.randint(2, 8), 0.5, weights=(1, 2, 3))
    part = random_partition(rng, g.vertices, rng.randint(2, 6))
    return PartitionedGame(g, part, uniform=rng.random() < 0.3)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 100_000))
def test_find_and_certify_agree_with_oracle(seed):
    rng = random.Random(seed)
    game = _random_game(rng)
    x = find_core_allocation(game)
    lam = find_balanced_certificate(game)
    assert (x is None) == (lam is not None)
    if x is not None:
        assert in_core(game.value, game.players, x)
    else:
        check = verify_balanced_certificate(game, lam)
        assert check.certifies_empty


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 100_000))
def test_core_point_is_lexicographically_smallest(seed):
    rng = random.Random(seed)
    game = _random_game(rng)
    x = find_core_allocation(game)
    if x is None:
        return
    # lowering any coordinate while keeping the earlier ones fixed must leave the core
    n = game.n
    players = game.players
    for k in range(n):
        rows, rhs = [], []
        for s in all_coalitions(players):
            rows.append([F(int(p in s)) for p in players])
            rhs.append(game.value(s))
        a_eq = [[F(1)] * n] + [[F(int(i == j)) for i in range(n)] for j in range(k)]
        b_eq = [game.grand_value()] + [x[players[j]] for j in range(k)]
        res = lp.minimize([F(int(i == k)) for i in range(n)], a_ge=rows, b_ge=rhs, a_eq=a_eq, b_eq=b_eq)
        assert res.value == x[players[k]]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 100_000))
def test_membership_matches_oracle_on_random_allocations(seed):
    rng = random.Random(seed)
    game = _random_game(rng)
    vn = game.grand_value()
    cuts = sorted(F(rng.randint(0, 6 * int(vn) + 6), 6) for _ in range(game.n - 1))
    cuts = [min(c, vn) for c in cuts]
    bounds = [F(0)] + cuts + [vn]
    x = {p: bounds[i + 1] - bounds[i] for i, p in enumerate(game.players)}
    block = check_core_membership(game, x, fast=False)
    assert (block is None) == in_core(game.value, game.players, x)
    if block is not None:
        worst = max(game.value(s) - sum(x[p] for p in s) for s in all_coalitions(game.players))
        assert block.excess == worst


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 100_000))
def test_width_one_fast_path_agrees_with_full_scan(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(2, 8), 0.5, weights=(1, 2, 3))
    game = PartitionedGame(g, Partition.singletons(g.vertices))
    vn = game.grand_value()
    x = {p: F(0) for p in game.players}
    for _ in range(int(vn) * 2):
        x[rng.choice(game.players)] += F(1, 2)
    fast = check_core_membership(game, x)
    slow = check_core_membership(game, x, fast=False)
    assert (fast is None) == (slow is None)
    if fast is not None:
        assert len(fast.players) <= 2
        assert fast.value == game.value(fast.players)
        assert fast.allocated == sum(x[p] for p in fast.players) < fast.value


def test_b_matching_core(fixture_path):
    game = load_game(fixture_path("fig3_bgame.json"))
    x = find_core_allocation(game)
    assert x is not None and in_core(game.value, game.players, x)


def test_bounds():
    g = Graph([str(i) for i in range(17)])
    game = PartitionedGame(g, Partition.singletons(g.vertices))
    with pytest.raises(BoundExceeded):
        find_core_allocation(game)
    with pytest.raises(BoundExceeded):
        most_violated_coalition(game, {p: 0 for p in game.players}, bound=16)
