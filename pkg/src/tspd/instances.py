"""Random instance generation and instance/solution file I/O.

Instances are generated with numpy's PCG64 generator seeded through
``SeedSequence`` so the same seed reproduces the same instance bit for bit.
Files are plain JSON with a fixed key order; loading rejects unknown fields
so format drift is caught early.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .evaluation import Evaluation, Objective
from .model import CostParams, DroneDelivery, Instance, Metric, Point, Solution

__all__ = [
    "ParseError",
    "generate",
    "save_instance",
    "load_instance",
    "save_solution",
    "load_solution",
]


class ParseError(ValueError):
    pass


def generate(
    n: int,
    area_km2: float,
    drone_eligible_fraction: float,
    seed: int,
    params: CostParams | None = None,
    id: str | None = None,
) -> Instance:
    """Uniform customers in a square of the given area, depot at the origin.

    Exactly ``round(fraction * n)`` customers are drone-eligible, drawn
    uniformly.  Output is a pure function of the arguments.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if area_km2 <= 0:
        raise ValueError("area_km2 must be > 0")
    if not 0.0 <= drone_eligible_fraction <= 1.0:
        raise ValueError("drone_eligible_fraction must be in [0, 1]")
    params = params or CostParams()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    side = float(np.sqrt(area_km2))
    coords = rng.random((n, 2)) * side
    n_eligible = int(np.floor(drone_eligible_fraction * n + 0.5))
    eligible = frozenset(int(c) + 1 for c in rng.permutation(n)[:n_eligible])
    points = (Point(0.0, 0.0),) + tuple(Point(float(x), float(y)) for x, y in coords)
    return Instance(
        points=points,
        drone_eligible=eligible,
        params=params,
        id=id if id is not None else f"n{n}-a{area_km2:g}-s{seed}",
        area_km2=float(area_km2),
    )


# --- JSON plumbing -------------------------------------------------------

def _require(obj: dict, field: str, where: str) -> Any:
    if field not in obj:
        raise ParseError(f"missing field: {field}" + (f" (in {where})" if where else ""))
    return obj[field]

def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError(f"unknown field: {sorted(unknown)[0]}" + (f" (in {where})" if where else ""))


_PARAM_FIELDS = [
    "c1", "c2", "alpha", "beta", "s_launch", "s_retrieve",
    "endurance", "truck_speed", "drone_speed", "truck_metric", "drone_metric",
]


def _params_to_json(p: CostParams) -> dict:
    out = {}
    for f in _PARAM_FIELDS:
        v = getattr(p, f)
        out[f] = v.value if isinstance(v, Metric) else float(v)
    return out


def _params_from_json(obj: dict) -> CostParams:
    if not isinstance(obj, dict):
        raise ParseError("params must be an object")
    _reject_unknown(obj, set(_PARAM_FIELDS), "params")
    kwargs: dict[str, Any] = {}
    for f in _PARAM_FIELDS:
        v = _require(obj, f, "params")
        if f.endswith("_metric"):
            try:
                kwargs[f] = Metric(v)
            except ValueError:
                raise ParseError(f"bad metric value for {f}: {v!r}") from None
        else:
            kwargs[f] = float(v)
    return CostParams(**kwargs)


def save_instance(instance: Instance, path: str | Path) -> Path:
    path = Path(path)
    depot = instance.points[0]
    doc = {
        "id": instance.id,
        "n": instance.n,
        "area": instance.area_km2,
        "params": _params_to_json(instance.params),
        "depot": {"x": depot.x, "y": depot.y},
        "customers": [
            {
                "x": instance.points[c].x,
                "y": instance.points[c].y,
                "drone_eligible": c in instance.drone_eligible,
            }
            for c in instance.customers
        ],
    }
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def load_instance(path: str | Path) -> Instance:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("instance file must hold a JSON object")
    _reject_unknown(doc, {"id", "n", "area", "params", "depot", "customers"}, "")
    inst_id = str(_require(doc, "id", ""))
    n = int(_require(doc, "n", ""))
    area = _require(doc, "area", "")
    area = None if area is None else float(area)
    params = _params_from_json(_require(doc, "params", ""))
    depot = _require(doc, "depot", "")
    _reject_unknown(depot, {"x", "y"}, "depot")
    customers = _require(doc, "customers", "")
    if not isinstance(customers, list):
        raise ParseError("customers must be a list")
    if len(customers) != n:
        raise ParseError(f"n is {n} but customers lists {len(customers)} entries")
    points = [Point(float(_require(depot, "x", "depot")), float(_require(depot, "y", "depot")))]
    eligible = set()
    for idx, c in enumerate(customers, start=1):
        _reject_unknown(c, {"x", "y", "drone_eligible"}, f"customers[{idx - 1}]")
        points.append(Point(float(_require(c, "x", f"customers[{idx - 1}]")),
                            float(_require(c, "y", f"customers[{idx - 1}]"))))
        if bool(_require(c, "drone_eligible", f"customers[{idx - 1}]")):
            eligible.add(idx)
    try:
        return Instance(
            points=tuple(points),
            drone_eligible=frozenset(eligible),
            params=params,
            id=inst_id,
            area_km2=area,
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def save_solution(
    solution: Solution,
    evaluation: Evaluation | None,
    path: str | Path,
    instance_id: str,
    objective: Objective = Objective.MIN_COST,
) -> Path:
    """Write a solution file; the costs block is advisory and re-derivable."""
    path = Path(path)
    costs = None
    if evaluation is not None:
        costs = {
            "truck_transport": evaluation.truck_transport_cost,
            "drone_transport": evaluation.drone_transport_cost,
            "truck_waiting": evaluation.truck_waiting_cost,
            "drone_waiting": evaluation.drone_waiting_cost,
            "total": evaluation.total_cost,
            "completion_time_minutes": evaluation.completion_time_minutes,
        }
    doc = {
        "instance_id": instance_id,
        "objective_kind": objective.value,
        "truck_tour": list(solution.truck_tour),
        "deliveries": [[d.launch, d.customer, d.rendezvous] for d in solution.sorted_deliveries()],
        "costs": costs,
    }
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def load_solution(path: str | Path) -> tuple[Solution, str, Objective]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("solution file must hold a JSON object")
    _reject_unknown(doc, {"instance_id", "objective_kind", "truck_tour", "deliveries", "costs"}, "")
    instance_id = str(_require(doc, "instance_id", ""))
    try:
        objective = Objective(_require(doc, "objective_kind", ""))
    except ValueError:
        raise ParseError(f"bad objective_kind: {doc.get('objective_kind')!r}") from None
    tour = _require(doc, "truck_tour", "")
    deliveries = _require(doc, "deliveries", "")
    if not isinstance(tour, list) or not all(isinstance(e, int) for e in tour):
        raise ParseError("truck_tour must be a list of node ids")
    if not isinstance(deliveries, list):
        raise ParseError("deliveries must be a list of [launch, customer, rendezvous] triples")
    dds = []
    for t in deliveries:
        if not (isinstance(t, list) and len(t) == 3 and all(isinstance(e, int) for e in t)):
            raise ParseError(f"bad delivery triple: {t!r}")
        dds.append(DroneDelivery(*t))
    _require(doc, "costs", "")
    return Solution(tour, dds), instance_id, objective
