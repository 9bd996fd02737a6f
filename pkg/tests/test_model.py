import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tspd.instances import generate
from tspd.model import (
    CostParams,
    DroneDelivery,
    Instance,
    Point,
    build_matrices,
    count_feasible_deliveries,
    enumerate_feasible_deliveries,
    is_feasible_delivery,
)

from conftest import random_instance


def test_matrices_worked_values():
    inst = Instance(points=(Point(0, 0), Point(3, 4)), drone_eligible=frozenset({1}))
    m = build_matrices(inst)
    assert m.d[0, 1] == 7.0  # manhattan
    assert m.d_drone[0, 1] == 5.0  # 3-4-5 triangle
    assert m.tau[0, 1] == pytest.approx(7.0 / 40.0 * 60.0)  # 10.5 minutes


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_matrices_invariants(seed):
    inst = random_instance(seed)
    m = inst.matrices
    n = inst.n
    for arr in (m.d, m.d_drone, m.tau, m.tau_drone):
        assert arr.shape == (n + 2, n + 2)
        assert np.allclose(np.diag(arr), 0.0)
        assert np.allclose(arr, arr.T)
    assert np.allclose(m.tau, m.d / inst.params.truck_speed * 60.0)
    assert np.allclose(m.tau_drone, m.d_drone / inst.params.drone_speed * 60.0)
    # the end depot aliases node 0 in every lookup
    assert np.array_equal(m.d[0], m.d[n + 1])
    assert np.array_equal(m.d[:, 0], m.d[:, n + 1])
    assert m.d_drone[0, n + 1] == 0.0


def test_endurance_zero_gives_empty_pool():
    inst = generate(5, 50.0, 1.0, seed=1, params=CostParams(endurance=0.0))
    assert enumerate_feasible_deliveries(inst) == set()
    assert count_feasible_deliveries(inst) == 0


def test_pool_matches_bruteforce_on_collinear(collinear_instance):
    inst = collinear_instance
    got = enumerate_feasible_deliveries(inst)
    td = inst.matrices.tau_drone
    expected = set()
    for i in range(0, inst.n + 1):
        for j in inst.drone_eligible:
            for k in range(1, inst.n + 2):
                if len({i, j, k}) == 3 and td[i, j] + td[j, k] <= inst.params.endurance:
                    expected.add(DroneDelivery(i, j, k))
    assert got == expected
    # a 2 km out-and-back flight takes 3 minutes, well within 20
    assert DroneDelivery(1, 2, 3) in got


def test_pool_size_order_of_magnitude_class_a():
    # 10 customers in a 100 km^2 square average a few hundred feasible sorties
    sizes = [count_feasible_deliveries(generate(10, 100.0, 0.8, seed=s)) for s in range(5)]
    for size in sizes:
        assert 200 <= size <= 1000


@given(st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_pool_closure(seed):
    inst = random_instance(seed, n=5)
    pool = enumerate_feasible_deliveries(inst)
    assert count_feasible_deliveries(inst) == len(pool)
    n = inst.n
    for i, j, k in itertools.product(range(n + 2), repeat=3):
        member = DroneDelivery(i, j, k) in pool
        assert member == is_feasible_delivery(inst, i, j, k)


def test_depot_roles_in_pool():
    inst = generate(4, 30.0, 1.0, seed=3)
    pool = enumerate_feasible_deliveries(inst)
    assert any(d.launch == 0 for d in pool)
    assert any(d.rendezvous == inst.n + 1 for d in pool)
    assert not any(d.launch == inst.n + 1 for d in pool)
    assert not any(d.rendezvous == 0 for d in pool)


def test_point_rejects_non_finite():
    with pytest.raises(ValueError):
        Point(math.nan, 0.0)


def test_params_validation():
    with pytest.raises(ValueError):
        CostParams(truck_speed=0.0)
    with pytest.raises(ValueError):
        CostParams(endurance=-1.0)
    assert CostParams().c1 == 25.0 * CostParams().c2


def test_instance_validation():
    with pytest.raises(ValueError):
        Instance(points=(Point(0, 0), Point(1, 1)), drone_eligible=frozenset({2}))


def test_cost_ratio_helper():
    p = CostParams().with_cost_ratio(50.0)
    assert p.c1 == 50.0 * p.c2
