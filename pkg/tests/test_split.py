import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tspd.evaluation import Objective, evaluate, objective_scalar, validate
from tspd.model import DroneDelivery, Instance, Point, Solution
from tspd.oracle import exact_split
from tspd.split import SplitError, build_and_search, extract, split

from conftest import random_instance, random_tour


def test_no_eligible_interior_gives_identity_chain(line_params):
    inst = Instance(
        points=(Point(0, 0), Point(1, 0), Point(1.5, 2), Point(3, 0)),
        drone_eligible=frozenset(),
        params=line_params,
    )
    tour = [0, 1, 2, 3, 4]
    tables = build_and_search(tour, inst, Objective.MIN_COST)
    assert tables.V[-1] == pytest.approx(250.0)
    assert tables.P == [-1, 0, 1, 2, 3]
    sol = extract(tables, tour, inst)
    assert sol == Solution(tour, ())


def test_collinear_tour_keeps_truck_only(collinear_instance):
    # all customers on the depot axis: removing any node saves no distance,
    # so every sortie would only add cost
    tour = [0, 1, 2, 3, 4]
    tables = build_and_search(tour, collinear_instance, Objective.MIN_COST)
    assert tables.V[-1] == pytest.approx(150.0)
    assert extract(tables, tour, collinear_instance).deliveries == frozenset()


def test_worked_example_split_optimum(line_instance):
    # the oracle-verified optimum of the fixed order 0,1,2,3,4 launches at 1
    # and recovers at the end depot; the classic fixed solution with the
    # rendezvous at 3 evaluates higher (192.98) and must not be selected
    tour = [0, 1, 2, 3, 4]
    tables = build_and_search(tour, line_instance, Objective.MIN_COST)
    sol = extract(tables, tour, line_instance)
    assert tables.V[-1] == pytest.approx(161.1382606207, abs=1e-6)
    assert sol.truck_tour == (0, 1, 3, 4)
    assert sol.deliveries == frozenset({DroneDelivery(1, 2, 4)})
    fixed = evaluate(line_instance, Solution([0, 1, 3, 4], [DroneDelivery(1, 2, 3)]))
    assert fixed.total_cost == pytest.approx(192.9848450049, abs=1e-6)
    assert tables.V[-1] < fixed.total_cost
    # T records the chosen sortie for the spanning arc 1 -> 4
    span = [arc for arc in tables.T if arc.from_node == 1 and arc.to_node == 4]
    assert span and span[0].drone_node == 2


def test_worked_example_min_time(line_instance_s1):
    tour = [0, 1, 2, 3, 4]
    tables = build_and_search(tour, line_instance_s1, Objective.MIN_TIME)
    sol = extract(tables, tour, line_instance_s1)
    assert tables.V[-1] == pytest.approx(11.0, abs=1e-9)
    assert evaluate(line_instance_s1, sol).completion_time_minutes == pytest.approx(11.0, abs=1e-9)
    assert sol.deliveries == frozenset({DroneDelivery(0, 2, 4)})


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_split_matches_exact_oracle(seed):
    inst = random_instance(seed, n=int(np.random.default_rng(seed).integers(4, 8)))
    tour = random_tour(inst, seed + 13)
    for objective in (Objective.MIN_COST, Objective.MIN_TIME):
        sol = split(tour, inst, objective)
        got = objective_scalar(evaluate(inst, sol), objective)
        want = objective_scalar(evaluate(inst, exact_split(tour, inst, objective)), objective)
        assert got == pytest.approx(want, rel=1e-9)


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_split_invariants(seed):
    inst = random_instance(seed)
    tour = random_tour(inst, seed + 7)
    objective = Objective.MIN_COST if seed % 2 else Objective.MIN_TIME
    tables = build_and_search(tour, inst, objective)
    sol = extract(tables, tour, inst)
    # extraction reproduces the table value and a feasible solution
    assert validate(inst, sol) == []
    assert objective_scalar(evaluate(inst, sol), objective) == pytest.approx(tables.V[-1], rel=1e-9)
    # never worse than driving the tour as-is
    plain = objective_scalar(evaluate(inst, Solution(tour, ())), objective)
    assert tables.V[-1] <= plain + 1e-9
    # V never decreases along the predecessor chain
    q = len(tour) - 1
    while q != 0:
        p = tables.P[q]
        assert tables.V[p] <= tables.V[q] + 1e-12
        q = p


def test_split_rejects_non_giant_tour(line_instance):
    with pytest.raises(SplitError):
        build_and_search([1, 2, 3], line_instance, Objective.MIN_COST)


def test_extract_rejects_foreign_tables(line_instance):
    tables = build_and_search([0, 1, 2, 3, 4], line_instance, Objective.MIN_COST)
    with pytest.raises(SplitError):
        extract(tables, [0, 2, 1, 3, 4], line_instance)
