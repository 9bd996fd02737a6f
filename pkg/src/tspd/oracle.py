"""Exhaustive reference solvers, usable only at desk scale.

These deliberately avoid the DAG shortest-path machinery: candidate solutions
are enumerated one by one and scored through the evaluator, so they provide
an independent check of both the split procedure and the metaheuristics.
"""

from __future__ import annotations

import itertools
import time

from .evaluation import Objective, evaluate, objective_scalar
from .model import DroneDelivery, Instance, Solution

__all__ = ["OracleTimeoutError", "exact_split", "exact_tspd"]

MAX_SPLIT_POSITIONS = 14
MAX_EXACT_N = 7


class OracleTimeoutError(TimeoutError):
    pass


def _order_respecting_solutions(tour: list[int], instance: Instance):
    """Yield every solution that keeps the tour order: each customer either
    stays on the truck tour or becomes the drone node of a span whose
    endpoints stay, with spans pairwise disjoint."""
    L = len(tour)
    eligible = [tour[j] in instance.drone_eligible for j in range(L)]
    td_mat = instance.matrices.tau_drone
    eps = instance.params.endurance

    feasible_j: dict[tuple[int, int], list[int]] = {}
    for a in range(0, L - 2):
        for q in range(a + 2, L):
            js = [
                j
                for j in range(a + 1, q)
                if eligible[j] and td_mat[tour[a], tour[j]] + td_mat[tour[j], tour[q]] <= eps
            ]
            if js:
                feasible_j[(a, q)] = js

    windows: list[tuple[int, int, int]] = []

    def rec(pos: int):
        if pos == L - 1:
            drone_positions = {j for _, j, _ in windows}
            td = [tour[p] for p in range(L) if p not in drone_positions]
            dds = [DroneDelivery(tour[a], tour[j], tour[q]) for a, j, q in windows]
            yield Solution(td, dds)
            return
        yield from rec(pos + 1)
        for q in range(pos + 2, L):
            js = feasible_j.get((pos, q))
            if not js:
                continue
            for j in js:
                windows.append((pos, j, q))
                yield from rec(q)
                windows.pop()

    yield from rec(0)


def exact_split(
    tour: list[int],
    instance: Instance,
    objective: Objective = Objective.MIN_COST,
) -> Solution:
    """Global minimum over all order-respecting sortie assignments of ``tour``."""
    if len(tour) > MAX_SPLIT_POSITIONS:
        raise ValueError(f"exact_split handles at most {MAX_SPLIT_POSITIONS} tour positions, got {len(tour)}")
    best: Solution | None = None
    best_val = float("inf")
    for sol in _order_respecting_solutions(list(tour), instance):
        val = objective_scalar(evaluate(instance, sol), objective)
        if val < best_val:
            best, best_val = sol, val
    assert best is not None
    return best


def exact_tspd(
    instance: Instance,
    objective: Objective = Objective.MIN_COST,
    time_limit_s: float = 120.0,
) -> Solution:
    """Provably optimal solution by enumerating every customer order and every
    order-respecting sortie assignment; aborts beyond the wall-clock guard."""
    n = instance.n
    if n > MAX_EXACT_N:
        raise ValueError(f"exact_tspd handles at most {MAX_EXACT_N} customers, got n={n}")
    start = time.perf_counter()
    best: Solution | None = None
    best_val = float("inf")
    for perm in itertools.permutations(range(1, n + 1)):
        if time.perf_counter() - start > time_limit_s:
            raise OracleTimeoutError(f"exact_tspd exceeded {time_limit_s:g} s on n={n}")
        tour = [0, *perm, n + 1]
        for sol in _order_respecting_solutions(tour, instance):
            val = objective_scalar(evaluate(instance, sol), objective)
            if val < best_val:
                best, best_val = sol, val
    assert best is not None
    return best
