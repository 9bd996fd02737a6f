import itertools

import pytest

from tspd.evaluation import Objective, evaluate, objective_scalar, validate
from tspd.milp import assign_variables, check_constraints
from tspd.model import CostParams, DroneDelivery, Instance, Point, Solution
from tspd.oracle import OracleTimeoutError, exact_split, exact_tspd
from tspd.construct import exact_tsp
from tspd.grasp import GraspConfig, run_grasp
from tspd.tspls import run_tspls

from conftest import random_instance


def test_exact_split_without_candidates(line_params):
    inst = Instance(
        points=(Point(0, 0), Point(1, 0), Point(1.5, 2), Point(3, 0)),
        drone_eligible=frozenset(),
        params=line_params,
    )
    tour = [0, 1, 2, 3, 4]
    assert exact_split(tour, inst) == Solution(tour, ())


def test_exact_split_worked_example(line_instance):
    sol = exact_split([0, 1, 2, 3, 4], line_instance)
    assert evaluate(line_instance, sol).total_cost == pytest.approx(161.1382606207, abs=1e-6)
    assert sol.deliveries == frozenset({DroneDelivery(1, 2, 4)})


def test_exact_split_size_guard(line_instance):
    with pytest.raises(ValueError):
        exact_split(list(range(15)), line_instance)


def test_exact_tspd_single_customer():
    # with nothing drone-eligible the truck must make the round trip
    inst = Instance(points=(Point(0, 0), Point(1, 1)), drone_eligible=frozenset())
    assert exact_tspd(inst) == Solution([0, 1, 2], ())
    # an eligible customer opens one alternative: launch at the start depot and
    # rejoin at the end depot while the truck stays put; take whichever wins
    inst2 = Instance(points=(Point(0, 0), Point(1, 1)), drone_eligible=frozenset({1}))
    truck_only = Solution([0, 1, 2], ())
    depot_sortie = Solution([0, 2], [DroneDelivery(0, 1, 2)])
    want = min(
        (evaluate(inst2, s).total_cost, s) for s in (truck_only, depot_sortie) if not validate(inst2, s)
    )
    got = exact_tspd(inst2)
    assert evaluate(inst2, got).total_cost == pytest.approx(want[0], rel=1e-12)


def test_exact_tspd_two_customers_matches_enumeration():
    params = CostParams(c1=25.0, c2=0.5, alpha=1.0, beta=1.0, s_launch=0.0, s_retrieve=0.0, endurance=30.0)
    inst = Instance(
        points=(Point(0, 0), Point(2, 0), Point(1, 2)),
        drone_eligible=frozenset({2}),
        params=params,
    )
    candidates = []
    for perm in itertools.permutations((1, 2)):
        candidates.append(Solution([0, *perm, 3], ()))
    candidates += [
        Solution([0, 1, 3], [DroneDelivery(0, 2, 1)]),
        Solution([0, 1, 3], [DroneDelivery(0, 2, 3)]),
        Solution([0, 1, 3], [DroneDelivery(1, 2, 3)]),
    ]
    feasible = [c for c in candidates if not validate(inst, c)]
    want = min(evaluate(inst, c).total_cost for c in feasible)
    got = evaluate(inst, exact_tspd(inst)).total_cost
    assert got == pytest.approx(want, rel=1e-12)


def test_exact_tspd_never_above_split_of_exact_tour():
    for seed in range(4):
        inst = random_instance(seed, n=5)
        opt = objective_scalar(evaluate(inst, exact_tspd(inst)), Objective.MIN_COST)
        fixed = objective_scalar(
            evaluate(inst, exact_split(exact_tsp(inst), inst)), Objective.MIN_COST
        )
        assert opt <= fixed + 1e-9


def test_solver_ordering_chain():
    for seed in range(3):
        inst = random_instance(seed + 7, n=5)
        opt = objective_scalar(evaluate(inst, exact_tspd(inst)), Objective.MIN_COST)
        grasp = run_grasp(inst, GraspConfig(n_tsp=120, seed=seed)).objective_value
        tspls = run_tspls(inst).objective_value
        assert opt - 1e-9 <= grasp
        assert opt - 1e-9 <= tspls


def test_oracle_solutions_survive_both_checkers():
    inst = random_instance(13, n=5)
    sol = exact_tspd(inst)
    assert validate(inst, sol) == []
    assert check_constraints(assign_variables(inst, sol), inst) == []


def test_timeout_guard():
    inst = random_instance(2, n=6)
    with pytest.raises(OracleTimeoutError):
        exact_tspd(inst, time_limit_s=1e-4)


def test_size_guard():
    inst = random_instance(3, n=8)
    with pytest.raises(ValueError):
        exact_tspd(inst)
