"""Command-line interface: generate instances, solve them, run benchmarks.

Examples:

  tspd generate --classes A,B --out instances/
  tspd solve --instance instances/A1.json --algo grasp --seed 7 --runs 3
  tspd bench --classes B,C,D --per-class 3 --out results/

The default output directory may also be set through the ``TSPD_OUT_DIR``
environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import bench as bench_mod
from .bench import CLASS_GRID, make_class_instances, run_algo, run_benchmark, summarize, write_table
from .evaluation import Objective
from .instances import generate, load_instance, save_instance, save_solution
from .model import CostParams, count_feasible_deliveries

OBJECTIVES = {"cost": Objective.MIN_COST, "time": Objective.MIN_TIME}
ALGOS = ("grasp", "grasp_plus", "tspls", "exact", "split_only")


def _out_dir(arg: str | None) -> Path:
    path = Path(arg or os.environ.get("TSPD_OUT_DIR", "."))
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_generate(args: argparse.Namespace) -> int:
    out = _out_dir(args.out)
    params = CostParams()
    if args.cost_ratio is not None:
        params = params.with_cost_ratio(args.cost_ratio)
    manifest = []
    labels = [c.strip().upper() for c in args.classes.split(",") if c.strip()]
    for label in labels:
        if label not in CLASS_GRID:
            print(f"unknown class {label!r}; choose from {','.join(CLASS_GRID)}", file=sys.stderr)
            return 2
        for inst in make_class_instances(label, seed=args.seed, count=args.count, fraction=args.fraction, params=params):
            path = out / f"{inst.id}.json"
            save_instance(inst, path)
            manifest.append(
                {
                    "id": inst.id,
                    "file": path.name,
                    "n": inst.n,
                    "area": inst.area_km2,
                    "density": round(inst.n / inst.area_km2, 4),
                    "drone_eligible": len(inst.drone_eligible),
                    "feasible_sorties": count_feasible_deliveries(inst),
                }
            )
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(manifest)} instances to {out}")
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    objective = OBJECTIVES[args.objective]
    out = _out_dir(args.out)
    result = run_algo(
        args.algo,
        instance,
        objective,
        seed=args.seed,
        runs=args.runs,
        n_tsp=args.n_tsp,
        workers=args.workers,
    )
    sol_path = out / f"{instance.id}-{args.algo}-{args.objective}.json"
    save_solution(result.best_solution, result.best_evaluation, sol_path, instance.id, objective)
    report = result.row()
    report["solution_file"] = sol_path.name
    print(json.dumps(report, indent=2))
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    out = _out_dir(args.out)
    objective = OBJECTIVES[args.objective]
    algos = tuple(a.strip() for a in args.algos.split(",") if a.strip())
    for a in algos:
        if a not in ALGOS:
            print(f"unknown algorithm {a!r}; choose from {','.join(ALGOS)}", file=sys.stderr)
            return 2

    instances = []
    if args.instances:
        import glob as globmod

        paths = sorted(globmod.glob(args.instances)) or [args.instances]
        for path in paths:
            instances.append(load_instance(path))
    else:
        for label in (c.strip().upper() for c in args.classes.split(",") if c.strip()):
            instances.extend(make_class_instances(label, seed=args.seed, count=args.per_class, fraction=args.fraction))

    results = run_benchmark(
        instances, algos=algos, objective=objective, seed=args.seed, runs=args.runs, n_tsp=args.n_tsp, workers=args.workers
    )
    rows = [r.row() for r in results]
    write_table(rows, out / "bench_main.csv")
    agg = summarize(results)
    (out / "bench_summary.json").write_text(json.dumps(agg, indent=2) + "\n")

    if args.ratios:
        ratios = tuple(float(x) for x in args.ratios.split(","))
        table = bench_mod.cost_ratio_sweep(instances, ratios=ratios, algos=algos, seed=args.seed, runs=1, n_tsp=args.n_tsp)
        rows = [
            {"cost_ratio": f"1:{r:g}", **{a: v for a, v in sorted(vals.items())}}
            for r, vals in sorted(table.items())
        ]
        write_table(rows, out / "bench_cost_ratio.csv")

    if args.drone_speeds:
        speeds = tuple(float(x) for x in args.drone_speeds.split(","))
        usage = bench_mod.drone_usage_sweep(instances, speeds=speeds, seed=args.seed, n_tsp=args.n_tsp)
        (out / "bench_drone_usage.json").write_text(json.dumps(usage, indent=2) + "\n")

    print(json.dumps(agg, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tspd", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate benchmark instances")
    g.add_argument("--classes", default="A", help="comma list of classes A..G")
    g.add_argument("--count", type=int, default=None, help="instances per class (default: class size)")
    g.add_argument("--fraction", type=float, default=0.8, help="drone-eligible fraction")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--cost-ratio", type=float, default=None, help="truck:drone cost ratio override")
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("--instance", required=True)
    s.add_argument("--algo", choices=ALGOS, default="grasp")
    s.add_argument("--objective", choices=sorted(OBJECTIVES), default="cost")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--n-tsp", type=int, default=None, help="iteration count override")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run the benchmark protocol")
    b.add_argument("--classes", default="B,C,D")
    b.add_argument("--per-class", type=int, default=3)
    b.add_argument("--instances", default=None, help="glob of instance files (overrides --classes)")
    b.add_argument("--fraction", type=float, default=0.8)
    b.add_argument("--algos", default="grasp,tspls")
    b.add_argument("--objective", choices=sorted(OBJECTIVES), default="cost")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--runs", type=int, default=1)
    b.add_argument("--n-tsp", type=int, default=None)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--ratios", default=None, help="comma list of truck:drone ratios to sweep")
    b.add_argument("--drone-speeds", default=None, help="comma list of drone speeds for the usage table")
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
