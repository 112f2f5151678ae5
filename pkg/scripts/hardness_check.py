"""Randomized equivalence checks for the hardness gadgets.

Each family pairs a generated game with an independent decision procedure
and counts disagreements:

  partition  zero-deviation minimal matching   vs  subset-sum
  cycles     same, on the compact cycle gadget  vs  subset-sum
  epm        minimal matching in the subdivided game  vs  perfect-matching enumeration

    python scripts/hardness_check.py --family epm --trials 50 --seed 1
"""
from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction

from pmgames.hardness import (
    brute_force_epm,
    expand_cycles,
    gen_compact_cycle_instance,
    gen_epm_instance,
    gen_partition_instance,
    has_even_split,
    solve_epm_via_game,
)
from pmgames.lexmin import minimal_matching_bruteforce


def check_partition(rng: random.Random) -> bool:
    a = [rng.randint(1, 8) for _ in range(rng.randint(1, 7))]
    inst = gen_partition_instance(a)
    _, worst = minimal_matching_bruteforce(inst.game, inst.target, bound=30)
    return (worst == 0) == has_even_split(a)


def check_cycles(rng: random.Random) -> bool:
    a = [rng.randint(1, 4) for _ in range(rng.randint(1, 4))]
    inst = gen_compact_cycle_instance(a)
    _, worst = minimal_matching_bruteforce(expand_cycles(inst.game), inst.target, bound=200)
    return (worst == 0) == has_even_split(a)


def check_epm(rng: random.Random) -> bool:
    rb = gen_epm_instance(rng.randint(2, 8), Fraction(1, 2), 0, rng.randrange(10**6))
    return all(
        (solve_epm_via_game(rb, k, bound=200) is None) == (brute_force_epm(rb, k) is None)
        for k in range(len(rb.red) + 1)
    )


FAMILIES = {"partition": check_partition, "cycles": check_cycles, "epm": check_epm}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", choices=sorted(FAMILIES) + ["all"], default="all")
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    names = sorted(FAMILIES) if args.family == "all" else [args.family]
    failed = 0
    for name in names:
        rng = random.Random(args.seed)
        start = time.perf_counter()
        bad = sum(not FAMILIES[name](rng) for _ in range(args.trials))
        failed += bad
        print(f"{name:10s} trials={args.trials:4d} mismatches={bad} time={time.perf_counter() - start:.1f}s")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
