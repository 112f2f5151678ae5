"""Multi-round international kidney exchange with carried-over credits.

Each round: build the game from the pool, compute an initial allocation y
(y(N) equal to the total outcome of an optimal matching), set the target
x = y + c, choose a matching, pass the deviations x - outcome on as the next
credits, drop matched pairs and sample arrivals.

Uniform pools are measured in kidneys (s-scale), so y sums to 2v(N) there.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np

from .errors import BoundExceeded, NotAnAllocation
from .games import PartitionedGame, outcome_total, received, shapley_value
from .graph import DirectedGraph, Partition
from .lexmin import lexmin_bruteforce, lexmin_uniform, lexmin_width1_directed, minimal_matching_bruteforce
from .rational import RationalLike, fmt, to_rational

CONCEPTS = ("shapley", "equal-split")
RULES = ("lexmin", "minimal-bruteforce")
MODES = ("uniform", "directed")


@dataclass(frozen=True)
class SimConfig:
    countries: int = 2
    initial_pool: int = 3  # pairs per country at the start
    arrival_rate: Fraction = Fraction(1)  # expected new pairs per country per round
    compat_prob: Fraction = Fraction(1, 3)
    rounds: int = 5
    seed: int = 0
    concept: str = "shapley"
    rule: str = "lexmin"
    mode: str = "uniform"
    epsilon: Fraction = Fraction(1, 10)
    desensitization_prob: Fraction = Fraction(1, 2)  # share of arcs with weight (1-eps)/2
    enumeration_bound: int = 16
    shapley_bound: int = 12

    def __post_init__(self):
        for name in ("arrival_rate", "compat_prob", "epsilon", "desensitization_prob"):
            object.__setattr__(self, name, _prob_like(getattr(self, name)))
        problems = []
        if self.countries < 1:
            problems.append("countries must be positive")
        if self.initial_pool < 0 or self.rounds < 0:
            problems.append("pool size and rounds must be nonnegative")
        if self.arrival_rate < 0:
            problems.append("arrival rate must be nonnegative")
        for name in ("compat_prob", "epsilon", "desensitization_prob"):
            if not 0 <= getattr(self, name) <= 1:
                problems.append(f"{name} must lie in [0, 1]")
        if self.concept not in CONCEPTS:
            problems.append(f"concept must be one of {CONCEPTS}")
        if self.rule not in RULES:
            problems.append(f"rule must be one of {RULES}")
        if self.mode not in MODES:
            problems.append(f"mode must be one of {MODES}")
        if problems:
            raise ValueError("; ".join(problems))

    @classmethod
    def from_json(cls, data: Mapping) -> "SimConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**dict(data))

    def to_json(self) -> dict:
        out = asdict(self)
        for k, v in out.items():
            if isinstance(v, Fraction):
                out[k] = fmt(v)
        return out


def _prob_like(v) -> Fraction:
    """Exact value from an int, Fraction or decimal/fraction string."""
    if isinstance(v, (bool, float)):
        raise TypeError("use an exact value (int, 'p/q' or decimal string)")
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(v)


@dataclass
class PoolState:
    vertices: list  # (pair id, country label) in arrival order
    arcs: dict  # (donor, patient) -> Fraction
    credits: dict  # country -> Fraction
    round: int = 0
    counter: int = 0
    matched: frozenset = frozenset()


@dataclass(frozen=True)
class RoundTrace:
    round: int
    value: Fraction
    y: dict
    c_in: dict
    x: dict
    outcome: dict  # s_p (uniform) or u_p (directed)
    c_out: dict
    matching: tuple

    def to_json(self) -> dict:
        countries = {
            p: {
                "y": fmt(self.y[p]),
                "c_in": fmt(self.c_in[p]),
                "x": fmt(self.x[p]),
                "s_or_u": fmt(self.outcome[p]),
                "c_out": fmt(self.c_out[p]),
            }
            for p in sorted(self.y, key=_label_key)
        }
        return {
            "round": self.round,
            "value": fmt(self.value),
            "matching": [list(e) for e in self.matching],
            "countries": countries,
        }


def _label_key(p: str):
    return (0, int(p)) if p.isdigit() else (1, p)


def _labels(config: SimConfig) -> list[str]:
    return [str(i) for i in range(1, config.countries + 1)]


def _bernoulli(rng: np.random.Generator, p: Fraction) -> bool:
    return bool(rng.integers(p.denominator) < p.numerator)


def _arc_weight(rng: np.random.Generator, config: SimConfig) -> Fraction:
    if config.mode == "uniform":
        return Fraction(1)
    if _bernoulli(rng, config.desensitization_prob):
        return (1 - config.epsilon) / 2
    return Fraction(1, 2)


def _add_pairs(state: PoolState, owners: list[str], rng: np.random.Generator, config: SimConfig) -> None:
    """Append new pairs and sample arcs for every ordered pair involving a newcomer."""
    old = [v for v, _ in state.vertices]
    new = []
    for p in owners:
        state.counter += 1
        new.append(f"p{state.counter}")
        state.vertices.append((new[-1], p))
    present = old + new
    fresh = set(new)
    for u in present:
        for v in present:
            if u != v and (u in fresh or v in fresh):
                if _bernoulli(rng, config.compat_prob):
                    state.arcs[(u, v)] = _arc_weight(rng, config)


def initial_state(config: SimConfig, rng: np.random.Generator) -> PoolState:
    state = PoolState([], {}, {p: Fraction(0) for p in _labels(config)})
    owners = [p for p in _labels(config) for _ in range(config.initial_pool)]
    _add_pairs(state, owners, rng, config)
    return state


def state_from_game(game: PartitionedGame) -> PoolState:
    """Pool state holding an explicit starting instance."""
    owner = game.partition.owner
    labels = game.partition.labels
    vertices = [(v, labels[owner[v]]) for v in game.graph.vertices]
    if game.directed:
        arcs = {(u, v): w for u, v, w in game.graph.arcs}
    else:
        arcs = {}
        for u, v, w in game.graph.edges:
            arcs[(u, v)] = arcs[(v, u)] = w / 2
    if game.uniform:
        arcs = {k: Fraction(1) for k in arcs}
    return PoolState(vertices, arcs, {p: Fraction(0) for p in labels}, counter=len(vertices))


def build_game(state: PoolState, config: SimConfig) -> PartitionedGame:
    labels = sorted(state.credits, key=_label_key)
    classes = {p: [] for p in labels}
    for v, p in state.vertices:
        classes[p].append(v)
    g = DirectedGraph([v for v, _ in state.vertices], [(u, v, w) for (u, v), w in state.arcs.items()])
    return PartitionedGame(g, Partition([classes[p] for p in labels], labels), uniform=config.mode == "uniform")


def initial_allocation(game: PartitionedGame, config: SimConfig) -> dict[str, Fraction]:
    """y with y(N) equal to the outcome total of any optimal matching."""
    total = outcome_total(game)
    if config.concept == "equal-split":
        return {p: total / game.n for p in game.players}
    phi = shapley_value(game, bound=config.shapley_bound)
    scale = 2 if game.uniform else 1
    return {p: scale * v for p, v in phi.items()}


def choose_matching(game: PartitionedGame, x: Mapping[str, Fraction], config: SimConfig) -> frozenset:
    bound = config.enumeration_bound
    if config.rule == "minimal-bruteforce":
        return minimal_matching_bruteforce(game, x, bound)[0]
    if game.uniform:
        return lexmin_uniform(game, x).matching
    if game.partition.width <= 1:
        return lexmin_width1_directed(game, x)
    return lexmin_bruteforce(game, x, bound)[0]


def step_round(state: PoolState, game: PartitionedGame, y: Mapping[str, RationalLike], config: SimConfig) -> tuple[RoundTrace, PoolState]:
    """Play one round on ``game`` with initial allocation ``y``."""
    y = {p: to_rational(y[p]) for p in game.players}
    total = outcome_total(game)
    if sum(y.values(), Fraction(0)) != total:
        raise NotAnAllocation(f"y sums to {fmt(sum(y.values(), Fraction(0)))}, expected {fmt(total)}")
    c_in = {p: state.credits.get(p, Fraction(0)) for p in game.players}
    x = {p: y[p] + c_in[p] for p in game.players}
    m = choose_matching(game, x, config)
    got = received(game, m)
    c_out = {p: x[p] - got[p] for p in game.players}
    edges = tuple(sorted(m))
    trace = RoundTrace(state.round + 1, game.grand_value(), y, c_in, x, got, c_out, edges)
    nxt = replace(state, credits=c_out, round=state.round + 1, matched=frozenset(v for e in m for v in e),
                  vertices=list(state.vertices), arcs=dict(state.arcs))
    return trace, nxt


def update_pool(state: PoolState, rng: np.random.Generator, config: SimConfig) -> PoolState:
    """Remove matched pairs, then add Poisson(arrival_rate) new pairs per country."""
    gone = state.matched
    nxt = PoolState(
        [(v, p) for v, p in state.vertices if v not in gone],
        {k: w for k, w in state.arcs.items() if k[0] not in gone and k[1] not in gone},
        dict(state.credits),
        state.round,
        state.counter,
    )
    lam = float(config.arrival_rate)  # Poisson rate is a sampling parameter, not a game quantity
    owners = []
    for p in sorted(state.credits, key=_label_key):
        owners += [p] * int(rng.poisson(lam))
    _add_pairs(nxt, owners, rng, config)
    return nxt


def run_simulation(config: SimConfig, start: Optional[PartitionedGame] = None) -> list[RoundTrace]:
    """Deterministic given ``config.seed``; ``start`` overrides the sampled initial pool."""
    rng = np.random.default_rng(config.seed)
    if start is not None:
        state = state_from_game(start)
        if config.mode == "uniform" and not start.uniform:
            raise ValueError("uniform simulation needs a uniform starting game")
    else:
        state = initial_state(config, rng)
    traces = []
    for _ in range(config.rounds):
        game = build_game(state, config)
        if config.concept == "shapley" and game.n > config.shapley_bound:
            raise BoundExceeded("shapley_value", game.n, config.shapley_bound)
        y = initial_allocation(game, config)
        trace, state = step_round(state, game, y, config)
        traces.append(trace)
        state = update_pool(state, rng, config)
    return traces


# -- output -------------------------------------------------------------------

CSV_FIELDS = ("round", "country", "y", "c_in", "x", "s_or_u", "c_out")


def traces_to_csv(traces: list[RoundTrace], seed: Optional[int] = None) -> str:
    buf = io.StringIO()
    if seed is not None:
        buf.write(f"# seed={seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for t in traces:
        for p in sorted(t.y, key=_label_key):
            w.writerow([t.round, p, fmt(t.y[p]), fmt(t.c_in[p]), fmt(t.x[p]), fmt(t.outcome[p]), fmt(t.c_out[p])])
    return buf.getvalue()


def traces_to_json(traces: list[RoundTrace], seed: Optional[int] = None) -> str:
    body = {"seed": seed, "rounds": [t.to_json() for t in traces]}
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def emit_trace(traces: list[RoundTrace], path: str, fmt_name: str = "csv", seed: Optional[int] = None) -> None:
    if fmt_name not in ("csv", "json"):
        raise ValueError("format must be csv or json")
    text = traces_to_csv(traces, seed) if fmt_name == "csv" else traces_to_json(traces, seed)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
