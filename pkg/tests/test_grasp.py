import pytest

from tspd.construct import exact_tsp, tour_length
from tspd.evaluation import Objective, evaluate, objective_scalar, validate
from tspd.grasp import GraspConfig, _run_iteration, run_grasp, run_grasp_plus
from tspd.instances import generate
from tspd.oracle import exact_tspd
from tspd.split import split

from conftest import random_instance


def test_single_iteration_equals_pipeline():
    inst = random_instance(4, n=6)
    cfg = GraspConfig(n_tsp=1, constructor="nearest", k_choices=(1,), seed=9)
    res = run_grasp(inst, cfg)
    val, it, sol = _run_iteration(inst, cfg, 0)
    assert it == 0
    assert res.solution == sol
    assert res.objective_value == pytest.approx(val)


def test_seed_determinism_across_worker_counts():
    inst = random_instance(8, n=7)
    cfg1 = GraspConfig(n_tsp=24, seed=5, parallel_workers=1)
    cfg2 = GraspConfig(n_tsp=24, seed=5, parallel_workers=2)
    r1 = run_grasp(inst, cfg1)
    r2 = run_grasp(inst, cfg2)
    assert r1.solution == r2.solution
    assert r1.objective_value == r2.objective_value
    assert r1.best_iteration == r2.best_iteration


def test_matches_exact_optimum_often():
    hits = 0
    for s in range(4):
        inst = generate(5, 60.0, 0.8, seed=900 + s)
        opt = objective_scalar(evaluate(inst, exact_tspd(inst)), Objective.MIN_COST)
        res = run_grasp(inst, GraspConfig(n_tsp=200, seed=s))
        assert validate(inst, res.solution) == []
        assert res.objective_value >= opt - 1e-9
        hits += res.objective_value == pytest.approx(opt, rel=1e-9)
    assert hits >= 3


def test_grasp_plus_collinear_stays_truck_only(collinear_instance):
    res = run_grasp_plus(collinear_instance)
    assert res.solution.deliveries == frozenset()
    assert res.objective_value == pytest.approx(150.0)


def test_grasp_plus_bounds():
    inst = random_instance(12, n=6)
    tour = exact_tsp(inst)
    res = run_grasp_plus(inst)
    split_val = objective_scalar(evaluate(inst, split(tour, inst, Objective.MIN_COST)), Objective.MIN_COST)
    opt = objective_scalar(evaluate(inst, exact_tspd(inst)), Objective.MIN_COST)
    assert opt - 1e-9 <= res.objective_value <= split_val + 1e-9


def test_no_drone_eligible_gives_exact_tsp_cost():
    inst = generate(7, 80.0, 0.0, seed=3)
    res = run_grasp_plus(inst)
    assert res.solution.deliveries == frozenset()
    assert res.objective_value == pytest.approx(
        inst.params.c1 * tour_length(inst, exact_tsp(inst))
    )


def test_config_validation():
    with pytest.raises(ValueError):
        GraspConfig(n_tsp=0)
    with pytest.raises(ValueError):
        GraspConfig(constructor="nope")
    with pytest.raises(ValueError):
        GraspConfig(k_choices=())


def test_min_time_objective_runs():
    inst = random_instance(21, n=6)
    res = run_grasp(inst, GraspConfig(n_tsp=40, seed=2, objective=Objective.MIN_TIME))
    assert validate(inst, res.solution) == []
    assert res.objective_value == pytest.approx(
        evaluate(inst, res.solution).completion_time_minutes
    )


def test_statistics_fields():
    inst = random_instance(30, n=5)
    res = run_grasp(inst, GraspConfig(n_tsp=15, seed=1))
    assert res.iterations == 15
    assert 0 <= res.best_iteration < 15
    assert res.wall_time_s > 0
