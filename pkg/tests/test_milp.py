import re
from dataclasses import replace

import numpy as np
import pytest

from tspd.evaluation import Objective, evaluate, validate
from tspd.instances import generate
from tspd.milp import (
    LP_MAX_N,
    assign_variables,
    big_m_value,
    check_constraints,
    lp_variable_count,
    objective_value,
    write_lp,
)
from tspd.model import CostParams, DroneDelivery, Instance, Point, Solution, enumerate_feasible_deliveries
from tspd.split import split

from conftest import random_instance, random_tour


def test_assign_pure_truck(line_instance):
    sol = Solution([0, 1, 2, 3, 4], ())
    a = assign_variables(line_instance, sol)
    assert all(v == 0 for v in a.y.values()) and not a.y
    assert np.all(a.w == 0) and np.all(a.wp == 0)
    assert [a.u[node] for node in (0, 1, 2, 3, 4)] == [0, 1, 2, 3, 4]
    assert a.x == {(0, 1): 1, (1, 2): 1, (2, 3): 1, (3, 4): 1}


def test_assign_worked_example(line_instance):
    sol = Solution([0, 1, 3, 4], [DroneDelivery(1, 2, 3)])
    a = assign_variables(line_instance, sol)
    assert a.y == {(1, 2, 3): 1}
    assert a.x == {(0, 1): 1, (1, 3): 1, (3, 4): 1}
    us = [a.u[node] for node in (0, 1, 3, 4)]
    assert us == sorted(us) and len(set(us)) == 4
    assert a.w[3] == pytest.approx(3.8423292192, abs=1e-6)
    assert a.wp[3] == 0.0


def test_checker_accepts_valid_solutions():
    for seed in range(6):
        inst = random_instance(seed, n=6)
        sol = split(random_tour(inst, seed), inst, Objective.MIN_COST)
        assert validate(inst, sol) == []
        assert check_constraints(assign_variables(inst, sol), inst) == []


def test_checker_flags_double_launch():
    inst = random_instance(9, n=6, endurance=60.0)
    inst = Instance(inst.points, frozenset(range(1, 7)), replace(inst.params, endurance=120.0), "w")
    sol = Solution([0, 1, 4, 5, 7], [DroneDelivery(1, 2, 4), DroneDelivery(1, 3, 5)])
    bad = check_constraints(assign_variables(inst, sol), inst)
    assert any(v.startswith("c10") for v in bad)


def test_checker_flags_position_inconsistency(line_instance):
    sol = Solution([0, 1, 2, 3, 4], ())
    a = assign_variables(line_instance, sol)
    a.u[2], a.u[3] = a.u[3], a.u[2]  # break monotonicity along chosen arcs
    bad = check_constraints(a, line_instance)
    assert any(v.startswith("c5") for v in bad)


def test_objective_examples(line_instance):
    pure = Solution([0, 1, 2, 3, 4], ())
    assert objective_value(assign_variables(line_instance, pure), line_instance) == pytest.approx(250.0)
    sol = Solution([0, 1, 3, 4], [DroneDelivery(1, 2, 3)])
    assert objective_value(assign_variables(line_instance, sol), line_instance) == pytest.approx(
        192.9848450049, abs=1e-6
    )
    tiny = Instance(points=(Point(0, 0), Point(2, 1)), drone_eligible=frozenset(), params=CostParams())
    trip = Solution([0, 1, 2], ())
    assert objective_value(assign_variables(tiny, trip), tiny) == pytest.approx(
        tiny.params.c1 * 2.0 * tiny.matrices.d[0, 1]
    )


def test_objective_matches_evaluator_on_random_solutions():
    for seed in range(8):
        inst = random_instance(seed, n=6)
        sol = split(random_tour(inst, seed + 1), inst, Objective.MIN_COST)
        a = assign_variables(inst, sol)
        assert objective_value(a, inst) == pytest.approx(evaluate(inst, sol).total_cost, abs=1e-6)


def test_strict_endurance_flag():
    params = CostParams(endurance=15.2, s_launch=1.0, s_retrieve=1.0)
    inst = Instance(
        points=(Point(0, 0), Point(1, 0), Point(1, 1), Point(10, 0)),
        drone_eligible=frozenset({2}),
        params=params,
    )
    sol = Solution([0, 1, 3, 4], [DroneDelivery(1, 2, 3)])
    assert validate(inst, sol) == []  # flight time 15.08 <= 15.2
    a = assign_variables(inst, sol)
    assert check_constraints(a, inst) == []
    strict = check_constraints(a, inst, strict_endurance_timing=True)
    assert any(v.startswith("c27") for v in strict)  # hover + retrieve overrun


# --- LP export ---------------------------------------------------------------

def _parse_lp(text: str):
    lines = text.splitlines()
    obj_terms: dict[str, float] = {}
    rows: dict[str, int] = {}
    section = None
    obj_buf: list[str] = []
    for line in lines:
        if line.startswith("\\"):
            continue
        head = line.strip()
        if head in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
            section = head
            continue
        if section == "Minimize":
            obj_buf.append(head)
        elif section == "Subject To":
            m = re.match(r"(c\d+)", head.split(":")[0].strip())
            if m:
                rows[m.group(1)] = rows.get(m.group(1), 0) + 1
    expr = " ".join(obj_buf)
    expr = expr.split(":", 1)[1]
    for sign, coef, name in re.findall(r"([+-]?)\s*(\d+(?:\.\d+)?(?:e-?\d+)?)?\s*([a-z]+_\d+(?:_\d+)?(?:_\d+)?)", expr):
        value = float(coef) if coef else 1.0
        if sign == "-":
            value = -value
        obj_terms[name] = value
    return obj_terms, rows


def test_lp_variable_count_closed_form():
    inst = generate(3, 20.0, 1.0, seed=4)
    pool = enumerate_feasible_deliveries(inst)
    n = inst.n
    expected = ((n + 1) * (n + 1) - n) + len(pool) + n * n + 7 * (n + 2)
    assert lp_variable_count(inst) == expected
    text = write_lp(inst)
    binaries = set()
    in_bin = False
    for line in text.splitlines():
        if line.strip() == "Binaries":
            in_bin = True
            continue
        if line.strip() == "End":
            in_bin = False
        if in_bin:
            binaries.update(line.split())
    continuous = {f"{fam}_{i}" for fam in ("u", "t", "tp", "r", "rp", "w", "wp") for i in range(n + 2)}
    assert len(binaries) + len(continuous) == expected


def test_lp_objective_coefficients():
    inst = generate(3, 20.0, 1.0, seed=4)
    text = write_lp(inst)
    obj, _ = _parse_lp(text)
    m = inst.matrices
    p = inst.params
    for i in range(0, 4):
        for j in range(1, 5):
            if i != j:
                want = p.c1 * float(m.d[i, j])
                if want == 0.0:  # zero-coefficient terms are omitted
                    assert f"x_{i}_{j}" not in obj
                else:
                    assert obj[f"x_{i}_{j}"] == pytest.approx(want, rel=1e-9)
    for d in sorted(enumerate_feasible_deliveries(inst)):
        name = f"y_{d.launch}_{d.customer}_{d.rendezvous}"
        assert obj[name] == pytest.approx(
            p.c2 * float(m.d_drone[d.launch, d.customer] + m.d_drone[d.customer, d.rendezvous]), rel=1e-9
        )
    for i in range(5):
        assert obj[f"w_{i}"] == p.alpha
        assert obj[f"wp_{i}"] == p.beta


def test_lp_row_multiplicities():
    inst = generate(3, 20.0, 1.0, seed=4)
    n = inst.n
    pool = sorted(enumerate_feasible_deliveries(inst))
    _, rows = _parse_lp(write_lp(inst))
    vd = sorted({d.customer for d in pool} | set())
    n_vd = len(sorted(inst.drone_eligible))
    launches = {d.launch for d in pool}
    rdvs = {d.rendezvous for d in pool}
    pairs_ik = {(d.launch, d.rendezvous) for d in pool}
    c16 = 0
    for (i, k) in pairs_ik:
        for l in range(1, n + 1):
            if l not in (i, k):
                c16 += 1
    expected = {
        "c2": n,
        "c3": 1,
        "c4": 1,
        "c5": (n + 1) * (n + 1) - n,
        "c6": n,
        "c7": sum(1 for d in pool if d.launch != 0),
        "c8": sum(1 for d in pool if d.launch == 0),
        "c9": (n + 1) * (n + 1) - n,
        "c10": len(launches),
        "c11": len(rdvs),
        "c12": n * (n - 1),
        "c13": n * (n - 1),
        "c14": n,
        "c15": n,
        "c16": c16,
        "c17": (n + 1) * (n + 1) - n,
        "c18": (n + 1) * (n + 1) - n,
        "c19": n_vd * n,
        "c20": n_vd * n,
        "c21": n_vd * n,
        "c22": n_vd * n,
        "c23": n,
        "c24": n,
        "c25": n + 1,
        "c26": n + 1,
        "c27": len(pool),
        "c28": 2 * (n + 2),
        "c29": n + 1,
        "c30": n + 1,
        "c31": 2,
        "c32": n + 2,
        "c33": 1,
        "c34": 1,
        "c35": 1,
        "c36": 1,
        "c40": n,
    }
    assert rows == expected


def test_lp_size_cap():
    inst = generate(LP_MAX_N + 1, 100.0, 0.8, seed=0)
    with pytest.raises(ValueError, match="variables"):
        write_lp(inst)


def test_big_m_dominates_schedule():
    for seed in range(5):
        inst = random_instance(seed, n=7)
        sol = split(random_tour(inst, seed), inst, Objective.MIN_COST)
        a = assign_variables(inst, sol)
        horizon = max(a.t.max(), a.tp.max(), a.r.max(), a.rp.max())
        assert big_m_value(inst) > horizon + float(inst.matrices.tau.max())
