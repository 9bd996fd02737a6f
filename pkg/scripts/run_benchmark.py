#!/usr/bin/env python3
"""Reproduce the main experiment tables on regenerated instances.

Writes, under --out (default results/):
  bench_main.csv / .json     per instance x algorithm metrics
  bench_summary.json         geometric means per algorithm
  bench_cost_ratio.csv       rho under truck:drone cost ratios 1:10/1:25/1:50
  bench_min_time.csv         min-time objective comparison
  bench_drone_usage.json     sortie counts per objective and drone speed

Scale the work with --per-class and --n-tsp; the defaults take roughly an
hour on one core.
"""

import argparse
import json
from pathlib import Path

from tspd.bench import (
    cost_ratio_sweep,
    drone_usage_sweep,
    make_class_instances,
    run_benchmark,
    summarize,
    write_table,
)
from tspd.evaluation import Objective


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--classes", default="B,C,D")
    ap.add_argument("--per-class", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--runs", type=int, default=1)
    ap.add_argument("--n-tsp", type=int, default=None)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    instances = []
    for label in args.classes.split(","):
        instances.extend(make_class_instances(label.strip().upper(), seed=args.seed, count=args.per_class))

    results = run_benchmark(instances, algos=("grasp", "tspls"), seed=args.seed,
                            runs=args.runs, n_tsp=args.n_tsp)
    write_table([r.row() for r in results], out / "bench_main.csv")
    (out / "bench_summary.json").write_text(json.dumps(summarize(results), indent=2) + "\n")

    ratio_table = cost_ratio_sweep(instances, seed=args.seed, n_tsp=args.n_tsp)
    rows = [{"cost_ratio": f"1:{r:g}", **vals} for r, vals in sorted(ratio_table.items())]
    write_table(rows, out / "bench_cost_ratio.csv")

    time_results = run_benchmark(instances, algos=("grasp_plus", "grasp", "tspls"),
                                 objective=Objective.MIN_TIME, seed=args.seed, n_tsp=args.n_tsp)
    write_table([r.row() for r in time_results], out / "bench_min_time.csv")

    usage = drone_usage_sweep(instances, seed=args.seed, n_tsp=args.n_tsp)
    (out / "bench_drone_usage.json").write_text(json.dumps(usage, indent=2) + "\n")
    print(f"tables written to {out}/")


if __name__ == "__main__":
    main()
