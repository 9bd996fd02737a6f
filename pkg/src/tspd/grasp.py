"""Randomized multi-start solver: construct a tour, split it, descend.

Every iteration draws its own generator from ``(seed, iteration)`` so runs
are reproducible and independent of how iterations are distributed over
worker processes; the winner is the lexicographically first (objective,
iteration) pair.
"""

from __future__ import annotations

import multiprocessing
import time
from dataclasses import dataclass

import numpy as np

from .construct import CONSTRUCTORS, exact_tsp, tsp_reference
from .evaluation import Evaluation, Objective, evaluate, objective_scalar
from .localsearch import improve
from .model import Instance, Solution
from .split import split

__all__ = ["GraspConfig", "GraspResult", "run_grasp", "run_grasp_plus"]


@dataclass(frozen=True)
class GraspConfig:
    n_tsp: int = 2000
    constructor: str = "nearest"  # one of CONSTRUCTORS
    k_choices: tuple[int, ...] = (2, 3)
    objective: Objective = Objective.MIN_COST
    seed: int = 0
    parallel_workers: int = 1
    local_search: bool = True

    def __post_init__(self) -> None:
        if self.n_tsp < 1:
            raise ValueError("n_tsp must be >= 1")
        if self.constructor not in CONSTRUCTORS:
            raise ValueError(f"unknown constructor {self.constructor!r}; pick from {sorted(CONSTRUCTORS)}")
        if not self.k_choices:
            raise ValueError("k_choices must not be empty")


@dataclass
class GraspResult:
    solution: Solution
    evaluation: Evaluation
    objective_value: float
    iterations: int
    best_iteration: int
    wall_time_s: float


def _iteration_rng(seed: int, iteration: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(iteration,))))


def _run_iteration(instance: Instance, config: GraspConfig, iteration: int) -> tuple[float, int, Solution]:
    rng = _iteration_rng(config.seed, iteration)
    build = CONSTRUCTORS[config.constructor]
    if config.constructor == "random":
        tour = build(instance, rng)
    else:
        ks = sorted(config.k_choices)
        k = ks[0] if len(ks) == 1 else ks[int(rng.integers(len(ks)))]
        tour = build(instance, k, rng)
    sol = split(tour, instance, config.objective)
    if config.local_search:
        sol = improve(sol, instance, config.objective)
    val = objective_scalar(evaluate(instance, sol), config.objective)
    return val, iteration, sol


_POOL_STATE: dict = {}


def _pool_init(instance: Instance, config: GraspConfig) -> None:
    _POOL_STATE["instance"] = instance
    _POOL_STATE["config"] = config


def _pool_run(iteration: int) -> tuple[float, int, Solution]:
    return _run_iteration(_POOL_STATE["instance"], _POOL_STATE["config"], iteration)


def run_grasp(instance: Instance, config: GraspConfig) -> GraspResult:
    """Best solution over ``n_tsp`` seeded construct/split/descend iterations."""
    start = time.perf_counter()
    results: list[tuple[float, int, Solution]]
    if config.parallel_workers > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(config.parallel_workers, initializer=_pool_init, initargs=(instance, config)) as pool:
            results = pool.map(_pool_run, range(config.n_tsp), chunksize=max(1, config.n_tsp // (4 * config.parallel_workers)))
    else:
        results = [_run_iteration(instance, config, it) for it in range(config.n_tsp)]
    best_val, best_iter, best_sol = min(results, key=lambda r: (r[0], r[1]))
    ev = evaluate(instance, best_sol)
    return GraspResult(
        solution=best_sol,
        evaluation=ev,
        objective_value=best_val,
        iterations=config.n_tsp,
        best_iteration=best_iter,
        wall_time_s=time.perf_counter() - start,
    )


def run_grasp_plus(
    instance: Instance,
    objective: Objective = Objective.MIN_COST,
    tour: list[int] | None = None,
) -> GraspResult:
    """Single pass from an optimal (or supplied best-known) tour."""
    start = time.perf_counter()
    if tour is None:
        tour = exact_tsp(instance) if instance.n <= 15 else tsp_reference(instance)
    sol = improve(split(tour, instance, objective), instance, objective)
    ev = evaluate(instance, sol)
    return GraspResult(
        solution=sol,
        evaluation=ev,
        objective_value=objective_scalar(ev, objective),
        iterations=1,
        best_iteration=0,
        wall_time_s=time.perf_counter() - start,
    )
