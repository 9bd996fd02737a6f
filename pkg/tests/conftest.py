import math

import numpy as np
import pytest

from tspd.evaluation import Objective, evaluate, objective_scalar
from tspd.instances import generate
from tspd.localsearch import apply_move
from tspd.model import CostParams, Instance, Point, Solution


@pytest.fixture
def line_params():
    return CostParams(
        c1=25.0, c2=1.0, alpha=10.0, beta=10.0,
        s_launch=0.0, s_retrieve=0.0, endurance=20.0,
        truck_speed=40.0, drone_speed=40.0,
    )


@pytest.fixture
def line_instance(line_params):
    """Three customers near a line; the worked example used across modules."""
    return Instance(
        points=(Point(0, 0), Point(1, 0), Point(1.5, 2), Point(3, 0)),
        drone_eligible=frozenset({1, 2, 3}),
        params=line_params,
        id="line3",
    )


@pytest.fixture
def line_instance_s1(line_params):
    from dataclasses import replace

    return Instance(
        points=(Point(0, 0), Point(1, 0), Point(1.5, 2), Point(3, 0)),
        drone_eligible=frozenset({1, 2, 3}),
        params=replace(line_params, s_launch=1.0, s_retrieve=1.0),
        id="line3-s1",
    )


@pytest.fixture
def collinear_instance(line_params):
    """Customers on the depot axis and a drone as expensive as the truck:
    a sortie can never pay off."""
    from dataclasses import replace

    return Instance(
        points=(Point(0, 0), Point(1, 0), Point(2, 0), Point(3, 0)),
        drone_eligible=frozenset({1, 2, 3}),
        params=replace(line_params, c2=25.0),
        id="collinear3",
    )


def random_instance(seed: int, n: int | None = None, **overrides) -> Instance:
    rng = np.random.default_rng(seed)
    n = n if n is not None else int(rng.integers(4, 9))
    kwargs = dict(
        s_launch=float(rng.integers(0, 2)),
        s_retrieve=float(rng.integers(0, 2)),
        alpha=float(rng.choice([5.0, 10.0])),
        beta=float(rng.choice([5.0, 10.0])),
        endurance=float(rng.integers(8, 30)),
    )
    kwargs.update(overrides)
    params = CostParams(**kwargs)
    return generate(
        n,
        float(rng.choice([40.0, 60.0, 100.0])),
        float(rng.choice([0.5, 0.8, 1.0])),
        seed=int(rng.integers(10**6)),
        params=params,
    )


def random_tour(instance: Instance, seed: int) -> list[int]:
    rng = np.random.default_rng(seed)
    perm = rng.permutation(np.arange(1, instance.n + 1))
    return [0] + [int(x) for x in perm] + [instance.n + 1]


def naive_best_move(solution: Solution, instance: Instance, objective: Objective):
    """Reference best move: enumerate canonical operators, evaluate fully."""
    base = objective_scalar(evaluate(instance, solution), objective)
    td = solution.truck_tour
    launches = {d.launch for d in solution.deliveries}
    rdv = {d.rendezvous for d in solution.deliveries}
    best = (math.inf, None)

    def consider(move):
        nonlocal best
        cand = apply_move(solution, instance, move)
        if cand is None:
            return
        val = objective_scalar(evaluate(instance, cand), objective)
        if val - base < best[0] - 1e-12:
            best = (val - base, move)

    customers = list(instance.customers)
    for a in customers:
        if a in td and a not in launches and a not in rdv:
            for b in td:
                if b != a and b != 0:
                    consider(("relocate_truck", a, b))
    for a in customers:
        if a in launches or a in rdv:
            continue
        for i in td:
            for k in td:
                if i != k and i != a and k != a:
                    consider(("relocate_drone", a, i, k))
    for d in solution.deliveries:
        for k in td:
            if k != 0:
                consider(("remove_drone", d.customer, k))
    for a in customers:
        for b in customers:
            if a < b:
                consider(("two_exchange", a, b))
    return best
