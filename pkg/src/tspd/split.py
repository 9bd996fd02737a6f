"""Optimal conversion of a fixed giant tour into a truck-plus-drone solution.

The tour positions form a DAG: an arc from position ``p`` to ``q`` either
follows the tour edge (``q = p + 1``) or spans ``q - p >= 2`` positions and
turns the best eligible in-between customer into a drone sortie launched at
``s[p]`` and recovered at ``s[q]``.  A shortest path from position 0 to the
end gives the best solution that preserves the relative order of the nodes;
spans on a path never overlap, so sortie interference is impossible by
construction.

Arc costs under the cost objective:

  adjacent:  c1 * d(s[p], s[q])
  spanning:  c1 * (truck path p..q with j removed) + c2 * (drone legs)
             + waiting fees of whichever vehicle arrives early at s[q]

and under the time objective:

  adjacent:  truck travel time
  spanning:  max(truck time with j removed, drone flight) + retrieve + launch
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf

import numpy as np

from .evaluation import Objective
from .model import DroneDelivery, Instance, Solution

__all__ = ["AuxArc", "SplitTables", "SplitError", "build_and_search", "extract", "split"]


@dataclass(frozen=True)
class AuxArc:
    """One auxiliary-graph arc; ``drone_node`` is set only on spanning arcs."""

    from_node: int
    to_node: int
    cost: float
    drone_node: int | None = None


@dataclass
class SplitTables:
    """Shortest-path tables over tour positions.

    ``P[q]``/``V[q]`` are the predecessor position and best value of tour
    position ``q``; ``T`` lists, for every spanning arc with a feasible
    sortie, the chosen drone node and the arc cost (node ids, not positions).
    """

    tour: tuple[int, ...]
    objective: Objective
    P: list[int]
    V: list[float]
    span_cost: np.ndarray  # (L, L), +inf where no feasible sortie
    span_j: np.ndarray  # (L, L), chosen drone position or -1

    @property
    def T(self) -> list[AuxArc]:
        a_idx, q_idx = np.nonzero(np.isfinite(self.span_cost))
        return [
            AuxArc(
                from_node=self.tour[a],
                to_node=self.tour[q],
                cost=float(self.span_cost[a, q]),
                drone_node=self.tour[self.span_j[a, q]],
            )
            for a, q in zip(a_idx.tolist(), q_idx.tolist())
        ]


class SplitError(ValueError):
    pass


def build_and_search(tour: list[int], instance: Instance, objective: Objective) -> SplitTables:
    s = list(tour)
    L = len(s)
    if L < 2 or s[0] != 0 or s[-1] != instance.depot_end:
        raise SplitError(f"not a giant tour: {s[:2]}...{s[-1:]}")
    m = instance.matrices
    p = instance.params
    sa = np.asarray(s)
    Dt = m.d[np.ix_(sa, sa)]
    Tt = m.tau[np.ix_(sa, sa)]
    Dd = m.d_drone[np.ix_(sa, sa)]
    Td = m.tau_drone[np.ix_(sa, sa)]

    step_d = Dt[np.arange(L - 1), np.arange(1, L)]
    step_t = Tt[np.arange(L - 1), np.arange(1, L)]
    pref_d = np.concatenate(([0.0], np.cumsum(step_d)))
    pref_t = np.concatenate(([0.0], np.cumsum(step_t)))

    min_time = objective is Objective.MIN_TIME
    adj = step_t.copy() if min_time else p.c1 * step_d

    # Per interior position: the extra distance/time of visiting that node
    # between its tour neighbours.
    idx = np.arange(1, L - 1)
    detour_d = Dt[idx - 1, idx] + Dt[idx, idx + 1] - Dt[idx - 1, idx + 1]
    detour_t = Tt[idx - 1, idx] + Tt[idx, idx + 1] - Tt[idx - 1, idx + 1]
    eligible = np.array([node in instance.drone_eligible for node in s])

    span_cost = np.full((L, L), inf)
    span_j = np.full((L, L), -1, dtype=int)
    for a in range(0, L - 2):
        mids = np.arange(a + 1, L - 1)
        mids = mids[eligible[mids]]
        if mids.size == 0:
            continue
        ends = np.arange(a + 2, L)
        flight = Td[a, mids][:, None] + Td[np.ix_(mids, ends)]
        ok = (mids[:, None] < ends[None, :]) & (flight <= p.endurance)
        if not ok.any():
            continue
        t_truck = (pref_t[ends] - pref_t[a])[None, :] - detour_t[mids - 1][:, None]
        if min_time:
            cost = np.maximum(t_truck, flight) + p.s_retrieve + p.s_launch
        else:
            truck_part = p.c1 * ((pref_d[ends] - pref_d[a])[None, :] - detour_d[mids - 1][:, None])
            drone_part = p.c2 * (Dd[a, mids][:, None] + Dd[np.ix_(mids, ends)])
            gap = flight - t_truck
            wait = p.alpha * np.maximum(0.0, gap) + p.beta * np.maximum(0.0, -gap)
            cost = truck_part + drone_part + wait
        cost = np.where(ok, cost, inf)
        best = np.argmin(cost, axis=0)  # first minimum -> smallest tour position
        best_cost = cost[best, np.arange(ends.size)]
        has = np.isfinite(best_cost)
        span_cost[a, ends[has]] = best_cost[has]
        span_j[a, ends[has]] = mids[best[has]]

    V = np.full(L, inf)
    P = np.full(L, -1, dtype=int)
    V[0] = 0.0
    for q in range(1, L):
        cand = V[:q] + span_cost[:q, q]
        cand[q - 1] = V[q - 1] + adj[q - 1]
        best_p = int(np.argmin(cand))  # ties resolve to the smallest position
        V[q] = float(cand[best_p])
        P[q] = best_p

    return SplitTables(
        tour=tuple(s),
        objective=objective,
        P=list(map(int, P)),
        V=list(map(float, V)),
        span_cost=span_cost,
        span_j=span_j,
    )


def extract(tables: SplitTables, tour: list[int], instance: Instance) -> Solution:
    """Walk the predecessor chain and rebuild the solution it encodes."""
    s = list(tour)
    if tuple(s) != tables.tour:
        raise SplitError("tables were built for a different tour")
    L = len(s)
    path = [L - 1]
    while path[-1] != 0:
        prev = tables.P[path[-1]]
        if prev < 0 or prev >= path[-1]:
            raise SplitError(f"broken predecessor chain at position {path[-1]}")
        path.append(prev)
    path.reverse()

    deliveries = []
    drone_nodes = set()
    for a, b in zip(path, path[1:]):
        if b - a < 2:
            continue
        jpos = int(tables.span_j[a, b])
        if jpos < 0 or not np.isfinite(tables.span_cost[a, b]):
            raise SplitError(f"no sortie recorded for chosen span {s[a]}->{s[b]}")
        deliveries.append(DroneDelivery(s[a], s[jpos], s[b]))
        drone_nodes.add(s[jpos])
    td = [node for node in s if node not in drone_nodes]
    return Solution(td, deliveries)


def split(tour: list[int], instance: Instance, objective: Objective = Objective.MIN_COST) -> Solution:
    """Best order-preserving solution of ``tour`` for the given objective."""
    tables = build_and_search(tour, instance, objective)
    return extract(tables, tour, instance)
