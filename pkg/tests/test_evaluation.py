import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tspd.evaluation import InvalidSolutionError, Objective, evaluate, evaluate_min_cost, evaluate_min_time, validate
from tspd.model import DroneDelivery, Solution
from tspd.split import split

from conftest import random_instance, random_tour


def test_pure_truck_tour(line_instance):
    sol = Solution([0, 1, 2, 3, 4], ())
    ev = evaluate_min_cost(line_instance, sol)
    assert ev.total_cost == pytest.approx(25.0 * (1 + 2.5 + 3.5 + 3))
    assert ev.total_cost == pytest.approx(250.0)
    assert ev.drone_transport_cost == 0.0
    assert ev.truck_waiting_cost == 0.0
    # completion is pure travel time when nothing launches
    assert ev.completion_time_minutes == pytest.approx(10.0 / 40.0 * 60.0)


def test_worked_example_min_cost(line_instance):
    sol = Solution([0, 1, 3, 4], [DroneDelivery(1, 2, 3)])
    ev = evaluate_min_cost(line_instance, sol)
    assert ev.truck_transport_cost == pytest.approx(150.0)
    assert ev.drone_transport_cost == pytest.approx(4.5615528128, abs=1e-6)
    assert ev.truck_waiting_cost == pytest.approx(38.4232921921, abs=1e-6)
    assert ev.drone_waiting_cost == 0.0
    assert ev.total_cost == pytest.approx(192.9848450049, abs=1e-6)
    w, wp = ev.timeline.waiting[3]
    assert w == pytest.approx(3.8423292192, abs=1e-9)
    assert wp == 0.0


def test_worked_example_min_time(line_instance_s1):
    sol = Solution([0, 1, 3, 4], [DroneDelivery(1, 2, 3)])
    ev = evaluate_min_time(line_instance_s1, sol)
    # segment elapsed max(3, 6.8423) plus launch and retrieve minutes
    assert ev.completion_time_minutes == pytest.approx(1.5 + 8.8423292192 + 4.5, abs=1e-6)
    # total_cost still reports the cost objective of the same solution
    assert ev.total_cost == pytest.approx(192.9848450049, abs=1e-6)


def test_validate_ok_for_full_tsp_tour(line_instance):
    assert validate(line_instance, Solution([0, 1, 2, 3, 4], ())) == []


def test_validate_customer_served_twice(line_instance):
    sol = Solution([0, 1, 2, 3, 4], [DroneDelivery(1, 2, 3)])
    codes = {v.code for v in validate(line_instance, sol)}
    assert "C" in codes


def test_validate_interference(line_instance):
    # launch at 2 happens inside the 1 -> 4(depot) flight window
    sol = Solution([0, 1, 2, 4], [DroneDelivery(1, 3, 4), DroneDelivery(2, 3, 4)])
    codes = {v.code for v in validate(line_instance, sol)}
    assert "D" in codes


def test_validate_collects_many_codes(line_instance):
    bad = Solution([0, 2, 4], [DroneDelivery(2, 5, 4)])
    codes = {v.code for v in validate(line_instance, bad)}
    assert "A" in codes  # customers 1 and 3 unserved
    assert "structure" in codes or "eligibility" in codes


def test_validate_endurance_and_eligibility():
    inst = random_instance(0, n=5)
    from dataclasses import replace

    from tspd.model import Instance

    tight = Instance(
        points=inst.points,
        drone_eligible=frozenset({1}),
        params=replace(inst.params, endurance=0.001),
        id="tight",
    )
    sol = Solution([0, 2, 3, 4, 5, 6], [DroneDelivery(2, 1, 3)])
    codes = {v.code for v in validate(tight, sol)}
    assert "endurance" in codes
    sol2 = Solution([0, 1, 3, 4, 5, 6], [DroneDelivery(1, 2, 3)])
    codes2 = {v.code for v in validate(tight, sol2)}
    assert "eligibility" in codes2


def test_evaluate_refuses_invalid(line_instance):
    with pytest.raises(InvalidSolutionError) as err:
        evaluate(line_instance, Solution([0, 1, 4], ()))
    assert any(v.code == "A" for v in err.value.violations)


def test_depot_endpoints_required(line_instance):
    assert any(v.code == "structure" for v in validate(line_instance, Solution([1, 2, 3, 4], ())))
    assert any(v.code == "structure" for v in validate(line_instance, Solution([0, 1, 2, 3], ())))


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_waiting_complementarity(seed):
    inst = random_instance(seed)
    sol = split(random_tour(inst, seed + 1), inst, Objective.MIN_COST)
    ev = evaluate(inst, sol)
    for w, wp in ev.timeline.waiting.values():
        assert w * wp == pytest.approx(0.0, abs=1e-12)
        assert w >= 0.0 and wp >= 0.0
    assert ev.total_cost == pytest.approx(
        ev.truck_transport_cost + ev.drone_transport_cost + ev.truck_waiting_cost + ev.drone_waiting_cost
    )


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_pure_tour_cost_is_exact_tour_length(seed):
    inst = random_instance(seed)
    tour = random_tour(inst, seed)
    ev = evaluate(inst, Solution(tour, ()))
    m = inst.matrices
    length = sum(float(m.d[a, b]) for a, b in zip(tour, tour[1:]))
    assert ev.total_cost == inst.params.c1 * length
    assert ev.completion_time_minutes == pytest.approx(length / inst.params.truck_speed * 60.0)


def test_timeline_departure_after_arrival(line_instance_s1):
    sol = Solution([0, 1, 3, 4], [DroneDelivery(1, 2, 3)])
    ev = evaluate(line_instance_s1, sol)
    tl = ev.timeline
    for node in sol.truck_tour:
        assert tl.truck_departure[node] >= tl.truck_arrival[node] - 1e-12
    launch_t, at_j, at_k = tl.drone_events[DroneDelivery(1, 2, 3)]
    assert launch_t == tl.truck_departure[1]
    assert at_j < at_k
