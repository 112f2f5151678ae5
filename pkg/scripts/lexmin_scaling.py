"""Wall-clock time of lexmin_uniform as the pool grows.

    python scripts/lexmin_scaling.py --sizes 50,100,200,400 --countries 10 --degree 8
"""
from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction
from itertools import combinations

from pmgames.games import PartitionedGame
from pmgames.graph import Graph, Partition
from pmgames.lexmin import lexmin_uniform


def random_instance(rng: random.Random, nv: int, countries: int, degree: float):
    vs = [f"v{i}" for i in range(nv)]
    p = min(1.0, degree / max(1, nv - 1))
    g = Graph(vs, [(a, b, 1) for a, b in combinations(vs, 2) if rng.random() < p])
    owner = [rng.randrange(countries) for _ in vs]
    classes = [[v for v, o in zip(vs, owner) if o == c] for c in range(countries)]
    part = Partition([c for c in classes if c])
    game = PartitionedGame(g, part, uniform=True)
    x = {lab: Fraction(rng.randint(0, 2 * len(c)), 2) for lab, c in zip(part.labels, part.classes)}
    return game, x


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="50,100,200")
    ap.add_argument("--countries", type=int, default=10)
    ap.add_argument("--degree", type=float, default=8.0, help="expected vertex degree")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    print("vertices,edges,seconds,max_deviation")
    for nv in (int(s) for s in args.sizes.split(",")):
        for _ in range(args.repeats):
            game, x = random_instance(rng, nv, args.countries, args.degree)
            start = time.perf_counter()
            res = lexmin_uniform(game, x)
            elapsed = time.perf_counter() - start
            print(f"{nv},{len(game.graph.edges)},{elapsed:.3f},{res.deviation[0] if res.deviation else 0}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
