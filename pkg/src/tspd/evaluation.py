"""Feasibility validation and objective evaluation.

A solution is feasible when

  (A) every customer is served by the truck or by the drone,
  (B) no customer is served twice by the drone,
  (C) every sortie launches and rejoins at truck stops, in tour order, with
      its customer off the truck tour and drone-eligible,
  (D) sorties do not interfere: while the drone is away no other sortie may
      launch or rejoin, so sortie spans on the tour may overlap at most at a
      shared endpoint,

plus the per-sortie endurance limit on flight time.

The min-cost objective is transport cost plus waiting fees.  For each sortie
the truck's elapsed time from launch to rendezvous is pure travel time along
the tour; whichever vehicle reaches the rendezvous first waits for the other
(the truck parks, the drone hovers).  Launch and retrieve service times do
not enter the waiting fees; they do shift the wall-clock timeline and hence
the completion time, which is the min-time objective.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from .model import DroneDelivery, Instance, Solution

__all__ = [
    "Objective",
    "Violation",
    "InvalidSolutionError",
    "Timeline",
    "Evaluation",
    "validate",
    "evaluate",
    "evaluate_min_cost",
    "evaluate_min_time",
    "objective_scalar",
]


class Objective(str, Enum):
    MIN_COST = "min_cost"
    MIN_TIME = "min_time"


@dataclass(frozen=True)
class Violation:
    code: str  # one of: structure, A, B, C, D, eligibility, endurance
    message: str
    nodes: tuple[int, ...] = ()

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


class InvalidSolutionError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


@dataclass(frozen=True)
class Timeline:
    """Wall-clock schedule of a solution, all times in minutes from departure.

    ``waiting`` maps each rendezvous node to ``(w, w')`` where ``w`` is the
    truck's wait (drone arrived later) and ``w'`` the drone's; at most one of
    the two is nonzero.
    """

    truck_arrival: dict[int, float]
    truck_departure: dict[int, float]
    drone_events: dict[DroneDelivery, tuple[float, float, float]]  # launch, at j, at k
    waiting: dict[int, tuple[float, float]]


@dataclass(frozen=True)
class Evaluation:
    truck_transport_cost: float
    drone_transport_cost: float
    truck_waiting_cost: float
    drone_waiting_cost: float
    total_cost: float
    completion_time_minutes: float
    timeline: Timeline


def objective_scalar(evaluation: Evaluation, objective: Objective) -> float:
    if objective is Objective.MIN_TIME:
        return evaluation.completion_time_minutes
    return evaluation.total_cost


def validate(instance: Instance, solution: Solution) -> list[Violation]:
    """All constraint violations of ``solution``; empty list means feasible."""
    n = instance.n
    td = solution.truck_tour
    out: list[Violation] = []

    if len(td) < 2 or td[0] != 0 or td[-1] != n + 1:
        out.append(Violation("structure", f"truck tour must run from 0 to {n + 1}", tuple(td[:1] + td[-1:])))
    seen: set[int] = set()
    for e in td:
        if e in seen:
            out.append(Violation("structure", f"node {e} repeated in truck tour", (e,)))
        seen.add(e)
        if not (0 <= e <= n + 1):
            out.append(Violation("structure", f"unknown node id {e}", (e,)))
    for e in td[1:-1]:
        if e in (0, n + 1):
            out.append(Violation("structure", f"depot id {e} inside the tour", (e,)))
    pos = {e: p for p, e in enumerate(td)}
    m = instance.matrices

    served_by_drone: dict[int, DroneDelivery] = {}
    for dd in solution.sorted_deliveries():
        i, j, k = dd.launch, dd.customer, dd.rendezvous
        if any(not (0 <= e <= n + 1) for e in (i, j, k)):
            out.append(Violation("structure", f"sortie ({i},{j},{k}) uses unknown node ids", (i, j, k)))
            continue
        if j in served_by_drone:
            out.append(Violation("B", f"customer {j} served twice by the drone", (j,)))
        else:
            served_by_drone[j] = dd
        if j not in instance.drone_eligible:
            out.append(Violation("eligibility", f"customer {j} is not drone-eligible", (j,)))
        if j in pos:
            out.append(Violation("C", f"customer {j} cannot be serviced by both the truck and drone", (j,)))
        if i not in pos:
            out.append(Violation("C", f"launch node {i} is not on the truck tour", (i,)))
        if k not in pos:
            out.append(Violation("C", f"rendezvous node {k} is not on the truck tour", (k,)))
        if i in pos and k in pos and pos[i] >= pos[k]:
            out.append(Violation("C", f"launch {i} does not precede rendezvous {k}", (i, k)))
        if len({i, j, k}) < 3:
            out.append(Violation("structure", f"sortie nodes not distinct: {(i, j, k)}", (i, j, k)))
        flight = m.tau_drone[i, j] + m.tau_drone[j, k]
        if flight > instance.params.endurance:
            out.append(
                Violation(
                    "endurance",
                    f"sortie ({i},{j},{k}) flies {flight:.3f} min > endurance "
                    f"{instance.params.endurance:g}",
                    (i, j, k),
                )
            )

    for c in instance.customers:
        if c not in pos and c not in served_by_drone:
            out.append(Violation("A", f"customer {c} is served by neither vehicle", (c,)))

    spans = sorted(
        (pos[dd.launch], pos[dd.rendezvous], dd)
        for dd in solution.deliveries
        if dd.launch in pos and dd.rendezvous in pos and pos[dd.launch] < pos[dd.rendezvous]
    )
    for (s1, e1, d1), (s2, e2, d2) in zip(spans, spans[1:]):
        if s2 < e1:
            out.append(
                Violation(
                    "D",
                    f"sortie ({d2.launch},{d2.customer},{d2.rendezvous}) starts inside the span of "
                    f"({d1.launch},{d1.customer},{d1.rendezvous})",
                    (d1.launch, d1.rendezvous, d2.launch),
                )
            )
    return out


def sortie_times(instance: Instance, solution: Solution) -> dict[DroneDelivery, tuple[float, float]]:
    """Per sortie ``(truck elapsed, drone elapsed)`` in minutes, travel only."""
    m = instance.matrices
    td = solution.truck_tour
    pos = {e: p for p, e in enumerate(td)}
    pref = [0.0]
    for a, b in zip(td, td[1:]):
        pref.append(pref[-1] + float(m.tau[a, b]))
    out = {}
    for dd in solution.deliveries:
        t_truck = pref[pos[dd.rendezvous]] - pref[pos[dd.launch]]
        t_drone = float(m.tau_drone[dd.launch, dd.customer] + m.tau_drone[dd.customer, dd.rendezvous])
        out[dd] = (t_truck, t_drone)
    return out


def evaluate(instance: Instance, solution: Solution) -> Evaluation:
    """Cost decomposition, waiting times and wall-clock timeline of a feasible solution."""
    violations = validate(instance, solution)
    if violations:
        raise InvalidSolutionError(violations)

    m = instance.matrices
    p = instance.params
    td = solution.truck_tour

    truck_dist = 0.0
    for a, b in zip(td, td[1:]):
        truck_dist += float(m.d[a, b])
    drone_dist = 0.0
    for dd in solution.deliveries:
        drone_dist += float(m.d_drone[dd.launch, dd.customer] + m.d_drone[dd.customer, dd.rendezvous])

    times = sortie_times(instance, solution)
    launches = {dd.launch: dd for dd in solution.deliveries}
    rendezvous = {dd.rendezvous: dd for dd in solution.deliveries}

    truck_wait_minutes = 0.0
    drone_wait_minutes = 0.0
    waiting: dict[int, tuple[float, float]] = {}
    for dd, (t_truck, t_drone) in times.items():
        w = max(0.0, t_drone - t_truck)
        wp = max(0.0, t_truck - t_drone)
        waiting[dd.rendezvous] = (w, wp)
        truck_wait_minutes += w
        drone_wait_minutes += wp

    # Wall-clock propagation: launch prep delays both vehicles at the launch
    # stop, the retrieve happens once the later vehicle is at the rendezvous.
    arrival: dict[int, float] = {}
    departure: dict[int, float] = {}
    drone_events: dict[DroneDelivery, tuple[float, float, float]] = {}
    clock = 0.0
    for idx, node in enumerate(td):
        if idx == 0:
            arrival[node] = 0.0
        else:
            clock += float(m.tau[td[idx - 1], node])
            arrival[node] = clock
        dd_in = rendezvous.get(node)
        if dd_in is not None:
            launch_t, _, drone_arr = drone_events[dd_in]
            clock = max(clock, drone_arr) + p.s_retrieve
        dd_out = launches.get(node)
        if dd_out is not None:
            clock += p.s_launch
            t_ij = float(m.tau_drone[node, dd_out.customer])
            t_jk = float(m.tau_drone[dd_out.customer, dd_out.rendezvous])
            drone_events[dd_out] = (clock, clock + t_ij, clock + t_ij + t_jk)
        departure[node] = clock

    return Evaluation(
        truck_transport_cost=p.c1 * truck_dist,
        drone_transport_cost=p.c2 * drone_dist,
        truck_waiting_cost=p.alpha * truck_wait_minutes,
        drone_waiting_cost=p.beta * drone_wait_minutes,
        total_cost=p.c1 * truck_dist + p.c2 * drone_dist + p.alpha * truck_wait_minutes + p.beta * drone_wait_minutes,
        completion_time_minutes=departure[td[-1]],
        timeline=Timeline(
            truck_arrival=arrival,
            truck_departure=departure,
            drone_events=drone_events,
            waiting=waiting,
        ),
    )


def evaluate_min_cost(instance: Instance, solution: Solution) -> Evaluation:
    return evaluate(instance, solution)


def evaluate_min_time(instance: Instance, solution: Solution) -> Evaluation:
    """Same decomposition; the min-time objective is ``completion_time_minutes``.

    ``total_cost`` still carries the min-cost objective of the same solution
    so the two objectives can be tabulated side by side.
    """
    return evaluate(instance, solution)
