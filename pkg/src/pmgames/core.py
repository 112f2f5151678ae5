"""Core membership, core non-emptiness with a core point, and
balanced-weight certificates of emptiness.

All work is exact and exhaustive over coalitions, guarded by size bounds.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from . import lp
from .errors import BoundExceeded, UnbalancedCertificate, UnknownPlayer
from .games import Allocation, Game, PartitionedGame, check_allocation
from .rational import RationalLike, fmt, to_rational

MEMBERSHIP_BOUND = 20
FIND_BOUND = 16


@dataclass(frozen=True)
class BlockingCoalition:
    players: tuple[str, ...]
    value: Fraction
    allocated: Fraction

    @property
    def excess(self) -> Fraction:
        return self.value - self.allocated

    def to_json(self) -> dict:
        return {"players": list(self.players), "value": fmt(self.value), "allocated": fmt(self.allocated)}


@dataclass(frozen=True)
class CertificateCheck:
    certifies_empty: bool
    weighted_value: Fraction  # sum of lambda(S) v(S)
    grand_value: Fraction


def _members(players: tuple[str, ...], mask: int) -> tuple[str, ...]:
    return tuple(p for i, p in enumerate(players) if mask >> i & 1)


def coalition_values(game: Game, bound: int = FIND_BOUND) -> list[Fraction]:
    """v(S) for every coalition, indexed by bitmask over ``game.players``."""
    n = game.n
    if n > bound:
        raise BoundExceeded("coalition_values", n, bound)
    cached = getattr(game, "_mask_values", None)
    if cached is not None:
        return cached
    vals = [game.value(_members(game.players, mask)) for mask in range(1 << n)]
    game._mask_values = vals
    return vals


def _mask_sums(x: list[Fraction]) -> list[Fraction]:
    sums = [Fraction(0)] * (1 << len(x))
    for mask in range(1, len(sums)):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + x[low.bit_length() - 1]
    return sums


def most_violated_coalition(game: Game, x: Mapping[str, Fraction], bound: int = MEMBERSHIP_BOUND) -> Optional[BlockingCoalition]:
    """Coalition maximizing v(S) - x(S) if positive; ties go to the smallest bitmask."""
    vals = coalition_values(game, bound)
    xs = _mask_sums([x[p] for p in game.players])
    best, best_mask = Fraction(0), None
    for mask in range(1, len(vals)):
        gap = vals[mask] - xs[mask]
        if gap > best:
            best, best_mask = gap, mask
    if best_mask is None:
        return None
    return BlockingCoalition(_members(game.players, best_mask), vals[best_mask], xs[best_mask])


def _edge_check(game: PartitionedGame, x: Mapping[str, Fraction]) -> Optional[BlockingCoalition]:
    """Width-1 games: only singletons and edges can block."""
    labels = game.partition.labels
    owner = game.partition.owner
    pos = {p: i for i, p in enumerate(game.players)}
    candidates = [(1 << i, (p,), Fraction(0)) for i, p in enumerate(labels)]
    for u, v in game.undirected.canonical_edges():
        p, q = labels[owner[u]], labels[owner[v]]
        pair = tuple(sorted((p, q), key=pos.__getitem__))
        candidates.append(((1 << pos[p]) | (1 << pos[q]), pair, game.weights[(u, v)]))
    best = None
    for mask, members, value in sorted(candidates, key=lambda t: t[0]):
        gap = value - sum((x[p] for p in members), Fraction(0))
        if gap > 0 and (best is None or gap > best[0]):
            best = (gap, members, value)
    if best is None:
        return None
    gap, members, value = best
    return BlockingCoalition(members, value, value - gap)


def check_core_membership(
    game: Game, x: Mapping[str, RationalLike], bound: int = MEMBERSHIP_BOUND, fast: bool = True
) -> Optional[BlockingCoalition]:
    """None if ``x`` is in the core, else a blocking coalition.

    Raises NotAnAllocation unless x(N) = v(N). Matching games (partitioned
    games of width 1) are checked on edges only when ``fast`` is set.
    """
    x = check_allocation(game, x)
    if fast and isinstance(game, PartitionedGame) and game.partition.width <= 1:
        return _edge_check(game, x)
    if game.n > bound:
        raise BoundExceeded("check_core_membership", game.n, bound)
    return most_violated_coalition(game, x, bound)


def _solve_restricted(game: Game, rows: list[int], floors: list[Fraction], fixed: list[Fraction], c: list[Fraction]):
    """LP in y = x - floors over the coalitions in ``rows``, with x_k fixed for k < len(fixed)."""
    n = game.n
    vals = coalition_values(game, FIND_BOUND)
    full = (1 << n) - 1
    a_ge, b_ge = [], []
    for mask in rows:
        a_ge.append([Fraction(mask >> i & 1) for i in range(n)])
        b_ge.append(vals[mask] - sum((floors[i] for i in range(n) if mask >> i & 1), Fraction(0)))
    a_eq = [[Fraction(1)] * n]
    b_eq = [vals[full] - sum(floors, Fraction(0))]
    for k, val in enumerate(fixed):
        a_eq.append([Fraction(int(i == k)) for i in range(n)])
        b_eq.append(val - floors[k])
    res = lp.minimize(c, a_ge, b_ge, a_eq, b_eq)
    if res.status != "optimal":
        return None
    return [y + f for y, f in zip(res.x, floors)]


def find_core_allocation(game: Game, bound: int = FIND_BOUND) -> Optional[Allocation]:
    """Lexicographically smallest core allocation (in player order), or None if the core is empty.

    Each coordinate is minimized in turn by an exact LP; coalition constraints
    are added lazily, always the most violated one.
    """
    n = game.n
    if n > bound:
        raise BoundExceeded("find_core_allocation", n, bound)
    if n == 0:
        return {}
    vals = coalition_values(game, bound)
    floors = [vals[1 << i] for i in range(n)]
    rows: list[int] = []
    fixed: list[Fraction] = []
    x = None
    for k in range(n):
        c = [Fraction(int(i == k)) for i in range(n)]
        while True:
            x = _solve_restricted(game, rows, floors, fixed, c)
            if x is None:
                return None
            cut = most_violated_coalition(game, dict(zip(game.players, x)), bound)
            if cut is None:
                break
            mask = sum(1 << game.players.index(p) for p in cut.players)
            rows.append(mask)
        fixed.append(x[k])
    return dict(zip(game.players, x))


def core_is_empty(game: Game, bound: int = FIND_BOUND) -> bool:
    return find_core_allocation(game, bound) is None


def _normalize_certificate(game: Game, lam: Mapping[Iterable[str], RationalLike]) -> dict[frozenset, Fraction]:
    known = set(game.players)
    out: dict[frozenset, Fraction] = {}
    for s, w in lam.items():
        key = frozenset(s)
        if not key:
            raise ValueError("certificate weights must be on nonempty coalitions")
        for p in key:
            if p not in known:
                raise UnknownPlayer(p)
        w = to_rational(w)
        if not 0 <= w <= 1:
            raise ValueError(f"certificate weight {fmt(w)} outside [0, 1]")
        out[key] = out.get(key, Fraction(0)) + w
    return out


def verify_balanced_certificate(game: Game, lam: Mapping[Iterable[str], RationalLike]) -> CertificateCheck:
    """Check balancedness and whether sum lambda(S) v(S) exceeds v(N).

    Raises UnbalancedCertificate naming the first player (in player order)
    whose weights do not sum to 1.
    """
    lam = _normalize_certificate(game, lam)
    for p in game.players:
        total = sum((w for s, w in lam.items() if p in s), Fraction(0))
        if total != 1:
            raise UnbalancedCertificate(p, total)
    weighted = sum((w * game.value(s) for s, w in lam.items() if w), Fraction(0))
    vn = game.grand_value()
    return CertificateCheck(weighted > vn, weighted, vn)


def find_balanced_certificate(game: Game, bound: int = 12) -> Optional[dict[frozenset, Fraction]]:
    """Balanced weights maximizing sum lambda(S) v(S); returned only if that exceeds v(N)."""
    n = game.n
    if n > bound:
        raise BoundExceeded("find_balanced_certificate", n, bound)
    vals = coalition_values(game, bound)
    masks = list(range(1, 1 << n))
    c = [-vals[m] for m in masks]
    a_eq = [[Fraction(m >> i & 1) for m in masks] for i in range(n)]
    res = lp.minimize(c, a_eq=a_eq, b_eq=[Fraction(1)] * n)
    if res.status != "optimal" or -res.value <= vals[-1]:
        return None
    return {frozenset(_members(game.players, m)): w for m, w in zip(masks, res.x) if w}


def certificate_to_json(lam: Mapping[frozenset, Fraction], order: Iterable[str]) -> dict:
    pos = {p: i for i, p in enumerate(order)}
    items = sorted(lam.items(), key=lambda kv: sorted(pos[p] for p in kv[0]))
    return {"lambda": [{"players": sorted(s, key=pos.__getitem__), "weight": fmt(w)} for s, w in items]}


def certificate_from_json(data) -> dict[frozenset, Fraction]:
    entries = data["lambda"] if isinstance(data, dict) else data
    out: dict[frozenset, Fraction] = {}
    for entry in entries:
        key = frozenset(str(p) for p in entry["players"])
        out[key] = out.get(key, Fraction(0)) + to_rational(entry["weight"])
    return out
