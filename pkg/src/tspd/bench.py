"""Benchmark protocol: instance classes, solver runs and report tables.

The seven instance classes mirror the experimental grid of customer count
and square area (in km^2): A (10, 100), B (50, 100), C (50, 500),
D (50, 1000), E (100, 100), F (100, 500), G (100, 1000).  Reported metrics
per instance and algorithm: best and average objective, performance ratio
rho against a reference value (geometric means across instances), sample
relative standard deviation across repeated runs, average wall time and the
waiting/completion statistics of the best solution.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, replace
from pathlib import Path

from .construct import tsp_reference
from .evaluation import Evaluation, Objective, evaluate, objective_scalar
from .grasp import GraspConfig, run_grasp, run_grasp_plus
from .metrics import geometric_mean, relative_std, rho
from .model import CostParams, Instance, Solution
from .tspls import run_tspls

__all__ = [
    "CLASS_GRID",
    "DEFAULT_N_TSP",
    "AlgoResult",
    "make_class_instances",
    "reference_value",
    "solve_once",
    "run_benchmark",
    "cost_ratio_sweep",
    "drone_usage_sweep",
    "write_table",
    "waiting_stats",
]

CLASS_GRID: dict[str, tuple[int, float, int]] = {
    # class -> (customers, area km^2, instance count)
    "A": (10, 100.0, 5),
    "B": (50, 100.0, 10),
    "C": (50, 500.0, 10),
    "D": (50, 1000.0, 10),
    "E": (100, 100.0, 10),
    "F": (100, 500.0, 10),
    "G": (100, 1000.0, 10),
}

# Iteration budget by instance size, chosen so a full benchmark run of one
# 100-customer instance stays inside a four-minute single-core budget.
DEFAULT_N_TSP: tuple[tuple[int, int], ...] = ((20, 2000), (50, 300), (10**9, 120))


def default_n_tsp(n: int) -> int:
    for bound, iters in DEFAULT_N_TSP:
        if n <= bound:
            return iters
    return DEFAULT_N_TSP[-1][1]


def make_class_instances(
    label: str,
    seed: int = 0,
    count: int | None = None,
    fraction: float = 0.8,
    params: CostParams | None = None,
) -> list[Instance]:
    from .instances import generate

    n, area, default_count = CLASS_GRID[label]
    count = default_count if count is None else count
    out = []
    for idx in range(count):
        out.append(
            generate(
                n=n,
                area_km2=area,
                drone_eligible_fraction=fraction,
                seed=seed * 10_000 + ord(label[0]) * 100 + idx,
                params=params,
                id=f"{label}{idx + 1}",
            )
        )
    return out


def reference_value(instance: Instance, objective: Objective, seed: int = 0) -> float:
    """Objective of the best-known truck-only tour (exact at desk scale)."""
    tour = tsp_reference(instance, seed=seed)
    ev = evaluate(instance, Solution(tour, ()))
    return objective_scalar(ev, objective)


def waiting_stats(evaluation: Evaluation) -> tuple[float, float, float]:
    """Total truck wait, total drone wait, completion time (minutes)."""
    w = sum(pair[0] for pair in evaluation.timeline.waiting.values())
    wp = sum(pair[1] for pair in evaluation.timeline.waiting.values())
    return w, wp, evaluation.completion_time_minutes


@dataclass
class AlgoResult:
    instance_id: str
    algo: str
    objective: Objective
    values: list[float]
    times: list[float]
    best_solution: Solution
    best_evaluation: Evaluation
    reference: float

    @property
    def best(self) -> float:
        return min(self.values)

    @property
    def average(self) -> float:
        return sum(self.values) / len(self.values)

    @property
    def rho_avg(self) -> float:
        return rho(self.average, self.reference)

    @property
    def sigma(self) -> float:
        return relative_std(self.values)

    @property
    def time_avg(self) -> float:
        return sum(self.times) / len(self.times)

    def row(self) -> dict:
        w, wp, t_done = waiting_stats(self.best_evaluation)
        return {
            "instance": self.instance_id,
            "algo": self.algo,
            "objective": self.objective.value,
            "gamma_best": round(self.best, 3),
            "gamma_avg": round(self.average, 3),
            "rho_avg": round(self.rho_avg, 2),
            "sigma": round(self.sigma, 2),
            "t_avg_s": round(self.time_avg, 3),
            "w_avg": round(w, 2),
            "wp_avg": round(wp, 2),
            "t_complete": round(t_done, 2),
            "reference": round(self.reference, 3),
            "runs": len(self.values),
            "drone_uses": len(self.best_solution.deliveries),
        }


def solve_once(
    algo: str,
    instance: Instance,
    objective: Objective,
    seed: int,
    n_tsp: int | None = None,
    workers: int = 1,
) -> tuple[Solution, Evaluation, float]:
    """One run of a named algorithm; returns (solution, evaluation, seconds)."""
    start = time.perf_counter()
    if algo == "grasp":
        cfg = GraspConfig(
            n_tsp=n_tsp or default_n_tsp(instance.n),
            objective=objective,
            seed=seed,
            parallel_workers=workers,
        )
        res = run_grasp(instance, cfg)
        sol, ev = res.solution, res.evaluation
    elif algo == "grasp_plus":
        tour = tsp_reference(instance, seed=seed) if instance.n > 15 else None
        res = run_grasp_plus(instance, objective, tour=tour)
        sol, ev = res.solution, res.evaluation
    elif algo == "tspls":
        res = run_tspls(instance, objective)
        sol, ev = res.solution, res.evaluation
    elif algo == "split_only":
        tour = tsp_reference(instance, seed=seed)
        from .split import split as split_tour

        sol = split_tour(tour, instance, objective)
        ev = evaluate(instance, sol)
    elif algo == "exact":
        from .oracle import exact_tspd

        sol = exact_tspd(instance, objective)
        ev = evaluate(instance, sol)
    else:
        raise ValueError(f"unknown algorithm {algo!r}")
    return sol, ev, time.perf_counter() - start


def run_algo(
    algo: str,
    instance: Instance,
    objective: Objective,
    seed: int = 0,
    runs: int = 1,
    n_tsp: int | None = None,
    workers: int = 1,
    reference: float | None = None,
) -> AlgoResult:
    values, times = [], []
    best: tuple[float, Solution, Evaluation] | None = None
    for r in range(runs):
        sol, ev, secs = solve_once(algo, instance, objective, seed + r, n_tsp=n_tsp, workers=workers)
        val = objective_scalar(ev, objective)
        values.append(val)
        times.append(secs)
        if best is None or val < best[0]:
            best = (val, sol, ev)
    ref = reference if reference is not None else reference_value(instance, objective, seed=seed)
    return AlgoResult(
        instance_id=instance.id,
        algo=algo,
        objective=objective,
        values=values,
        times=times,
        best_solution=best[1],
        best_evaluation=best[2],
        reference=ref,
    )


def run_benchmark(
    instances: list[Instance],
    algos: tuple[str, ...] = ("grasp", "tspls"),
    objective: Objective = Objective.MIN_COST,
    seed: int = 0,
    runs: int = 1,
    n_tsp: int | None = None,
    workers: int = 1,
) -> list[AlgoResult]:
    out = []
    for inst in instances:
        ref = reference_value(inst, objective, seed=seed)
        for algo in algos:
            out.append(
                run_algo(algo, inst, objective, seed=seed, runs=runs, n_tsp=n_tsp, workers=workers, reference=ref)
            )
    return out


def summarize(results: list[AlgoResult]) -> dict[str, dict]:
    """Geometric means of rho and wall time per algorithm."""
    by_algo: dict[str, list[AlgoResult]] = {}
    for r in results:
        by_algo.setdefault(r.algo, []).append(r)
    out = {}
    for algo, rs in sorted(by_algo.items()):
        out[algo] = {
            "rho_geomean": round(geometric_mean([r.rho_avg for r in rs]), 2),
            "time_geomean_s": round(geometric_mean([max(r.time_avg, 1e-9) for r in rs]), 3),
            "instances": len(rs),
        }
    return out


def cost_ratio_sweep(
    instances: list[Instance],
    ratios: tuple[float, ...] = (10.0, 25.0, 50.0),
    algos: tuple[str, ...] = ("grasp", "tspls"),
    seed: int = 0,
    runs: int = 1,
    n_tsp: int | None = None,
) -> dict[float, dict[str, float]]:
    """Geometric-mean rho per truck:drone cost ratio and algorithm."""
    table: dict[float, dict[str, float]] = {}
    for ratio in ratios:
        variants = [
            replace_params(inst, inst.params.with_cost_ratio(ratio), suffix=f"r{ratio:g}")
            for inst in instances
        ]
        results = run_benchmark(variants, algos=algos, objective=Objective.MIN_COST,
                                seed=seed, runs=runs, n_tsp=n_tsp)
        table[ratio] = {algo: stats["rho_geomean"] for algo, stats in summarize(results).items()}
    return table


def drone_usage_sweep(
    instances: list[Instance],
    speeds: tuple[float, ...] = (25.0, 40.0, 55.0),
    seed: int = 0,
    n_tsp: int | None = None,
) -> dict:
    """Average sortie counts: cost objective at default speed, time objective
    across the drone-speed grid."""
    mincost = run_benchmark(instances, algos=("grasp",), objective=Objective.MIN_COST,
                            seed=seed, n_tsp=n_tsp)
    usage: dict = {"min_cost": _avg_uses(mincost)}
    for speed in speeds:
        variants = [
            replace_params(inst, replace(inst.params, drone_speed=speed), suffix=f"v{speed:g}")
            for inst in instances
        ]
        res = run_benchmark(variants, algos=("grasp_plus",), objective=Objective.MIN_TIME,
                            seed=seed, n_tsp=n_tsp)
        usage[f"min_time_{speed:g}"] = _avg_uses(res)
    return usage


def _avg_uses(results: list[AlgoResult]) -> float:
    return round(sum(len(r.best_solution.deliveries) for r in results) / len(results), 2)


def replace_params(instance: Instance, params: CostParams, suffix: str) -> Instance:
    return Instance(
        points=instance.points,
        drone_eligible=instance.drone_eligible,
        params=params,
        id=f"{instance.id}-{suffix}",
        area_km2=instance.area_km2,
    )


def write_table(rows: list[dict], path: Path, header: list[str] | None = None) -> None:
    """CSV with a fixed column order plus a JSON mirror next to it."""
    path = Path(path)
    if not rows:
        path.write_text("")
        path.with_suffix(".json").write_text("[]\n")
        return
    header = header or list(rows[0].keys())
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=header)
        writer.writeheader()
        writer.writerows(rows)
    path.with_suffix(".json").write_text(json.dumps(rows, indent=2) + "\n")
