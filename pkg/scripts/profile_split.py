#!/usr/bin/env python3
"""Timing sweep of the split procedure across instance sizes."""

import argparse
import time

from tspd.construct import tsp_reference
from tspd.evaluation import Objective
from tspd.instances import generate
from tspd.split import split


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="25,50,100,150")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=9)
    args = ap.parse_args()

    for n in (int(s) for s in args.sizes.split(",")):
        inst = generate(n, 500.0, 0.8, seed=args.seed)
        tour = tsp_reference(inst, seed=0)
        times = []
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            split(tour, inst, Objective.MIN_COST)
            times.append(time.perf_counter() - t0)
        print(f"n={n:4d}  best {min(times) * 1000:8.2f} ms  mean {sum(times) / len(times) * 1000:8.2f} ms")


if __name__ == "__main__":
    main()
