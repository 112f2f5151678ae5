"""Small exact linear programs over the rationals.

Dense two-phase tableau simplex. Entering columns follow the most negative
reduced cost; after a run of degenerate pivots the rule switches to Bland's
until the objective moves again, which rules out cycling. Intended for tens
of variables and up to a few thousand rows.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Row = Sequence[Fraction]

_STALL_LIMIT = 50  # consecutive degenerate pivots before switching to Bland's rule


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None


def _pivot(tab: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    row = tab[r]
    p = row[c]
    if p != 1:
        inv = 1 / p
        row[:] = [v * inv for v in row]
    nz = [(j, v) for j, v in enumerate(row) if v]
    for i, other in enumerate(tab):
        if i == r:
            continue
        f = other[c]
        if f:
            for j, v in nz:
                other[j] -= f * v
    basis[r] = c


def _simplex(tab: list[list[Fraction]], basis: list[int], allowed: int) -> bool:
    """Minimize the objective stored in the last row. False when unbounded.

    The objective row holds reduced costs; columns at index >= ``allowed``
    never enter the basis.
    """
    m = len(tab) - 1
    obj = tab[m]
    stalled = 0
    while True:
        if stalled < _STALL_LIMIT:
            enter = min(range(allowed), key=obj.__getitem__, default=None)
            if enter is not None and obj[enter] >= 0:
                enter = None
        else:
            enter = next((j for j in range(allowed) if obj[j] < 0), None)
        if enter is None:
            return True
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        stalled = stalled + 1 if best[0] == 0 else 0
        _pivot(tab, basis, best[1], enter)


def minimize(
    c: Row,
    a_ge: Sequence[Row] = (),
    b_ge: Row = (),
    a_eq: Sequence[Row] = (),
    b_eq: Row = (),
) -> LPResult:
    """min c.x subject to a_ge x >= b_ge, a_eq x = b_eq, x >= 0."""
    n = len(c)
    rows: list[tuple[list[Fraction], Fraction, bool]] = []
    for a, b in zip(a_ge, b_ge):
        rows.append(([Fraction(v) for v in a], Fraction(b), True))
    for a, b in zip(a_eq, b_eq):
        rows.append(([Fraction(v) for v in a], Fraction(b), False))
    m = len(rows)
    n_surplus = sum(1 for r in rows if r[2])
    width = n + n_surplus + m  # structural, surplus, artificial
    tab: list[list[Fraction]] = []
    basis: list[int] = []
    k = 0
    for i, (a, b, ge) in enumerate(rows):
        line = a + [Fraction(0)] * (n_surplus + m) + [b]
        if ge:
            line[n + k] = Fraction(-1)
            k += 1
        if b < 0:
            line = [-v for v in line]
        line[n + n_surplus + i] = Fraction(1)
        tab.append(line)
        basis.append(n + n_surplus + i)

    # phase 1: minimize the sum of artificials
    phase1 = [Fraction(0)] * (width + 1)
    for line in tab:
        for j in range(n + n_surplus):
            phase1[j] -= line[j]
        phase1[-1] -= line[-1]
    tab.append(phase1)
    _simplex(tab, basis, n + n_surplus)
    if tab[-1][-1] != 0:
        return LPResult("infeasible")
    tab.pop()

    # drive remaining (zero-valued) artificials out of the basis
    keep = []
    for i in range(m):
        if basis[i] >= n + n_surplus:
            col = next((j for j in range(n + n_surplus) if tab[i][j] != 0), None)
            if col is None:
                continue  # redundant row
            _pivot(tab, basis, i, col)
        keep.append(i)
    tab = [tab[i] for i in keep]
    basis = [basis[i] for i in keep]

    obj = [Fraction(v) for v in c] + [Fraction(0)] * (width - n + 1)
    for i, bvar in enumerate(basis):
        f = obj[bvar]
        if f:
            obj = [o - f * t for o, t in zip(obj, tab[i])]
    tab.append(obj)
    if not _simplex(tab, basis, n + n_surplus):
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i, bvar in enumerate(basis):
        if bvar < n:
            x[bvar] = tab[i][-1]
    return LPResult("optimal", tuple(x), -tab[-1][-1])
