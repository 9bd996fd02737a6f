"""Core domain types for the truck-and-drone routing problem.

A problem instance has one depot and ``n`` customers.  Node ids run from 0 to
``n + 1``: id 0 is the depot at the start of the tour and id ``n + 1`` is the
same physical depot at the end (kept as a distinct index so tour and timing
arithmetic stay literal).  The truck serves customers along a tour while a
single drone performs sorties: it launches from a truck stop ``i``, serves one
customer ``j`` and rejoins the truck further down the tour at ``k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "Metric",
    "Point",
    "CostParams",
    "Instance",
    "Matrices",
    "DroneDelivery",
    "Solution",
    "build_matrices",
    "enumerate_feasible_deliveries",
    "count_feasible_deliveries",
    "is_feasible_delivery",
]


class Metric(str, Enum):
    MANHATTAN = "manhattan"
    EUCLIDEAN = "euclidean"


@dataclass(frozen=True)
class Point:
    """A location on the plane, coordinates in kilometres."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class CostParams:
    """Cost and timing parameters shared by all solvers.

    Costs are per kilometre (``c1`` truck, ``c2`` drone); waiting fees
    ``alpha``/``beta`` are per minute; service and endurance times are in
    minutes; speeds in km/h.
    """

    c1: float = 25.0
    c2: float = 1.0
    alpha: float = 10.0
    beta: float = 10.0
    s_launch: float = 1.0
    s_retrieve: float = 1.0
    endurance: float = 20.0
    truck_speed: float = 40.0
    drone_speed: float = 40.0
    truck_metric: Metric = Metric.MANHATTAN
    drone_metric: Metric = Metric.EUCLIDEAN

    def __post_init__(self) -> None:
        object.__setattr__(self, "truck_metric", Metric(self.truck_metric))
        object.__setattr__(self, "drone_metric", Metric(self.drone_metric))
        for name in ("c1", "c2", "alpha", "beta", "s_launch", "s_retrieve", "endurance"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.truck_speed <= 0 or self.drone_speed <= 0:
            raise ValueError("speeds must be > 0")

    def with_cost_ratio(self, ratio: float) -> "CostParams":
        """Same params with the truck cost set to ``ratio`` times the drone cost."""
        return replace(self, c1=ratio * self.c2)


def _distance(a: Point, b: Point, metric: Metric) -> float:
    dx = a.x - b.x
    dy = a.y - b.y
    if metric is Metric.MANHATTAN:
        return abs(dx) + abs(dy)
    return math.hypot(dx, dy)


@dataclass(frozen=True)
class Matrices:
    """Distance (km) and travel-time (minutes) lookups, indexed by node id.

    All four arrays are ``(n + 2) x (n + 2)``; the row and column for node
    ``n + 1`` duplicate those of node 0.
    """

    d: np.ndarray
    d_drone: np.ndarray
    tau: np.ndarray
    tau_drone: np.ndarray


@dataclass
class Instance:
    """An immutable problem instance (treat as read-only after construction).

    ``points`` holds the depot at index 0 followed by the ``n`` customers;
    node id ``n + 1`` maps back onto ``points[0]``.
    """

    points: tuple[Point, ...]
    drone_eligible: frozenset[int]
    params: CostParams = field(default_factory=CostParams)
    id: str = ""
    area_km2: float | None = None  # metadata from the generator, not used by solvers

    def __post_init__(self) -> None:
        self.points = tuple(self.points)
        self.drone_eligible = frozenset(self.drone_eligible)
        if len(self.points) < 2:
            raise ValueError("instance needs a depot and at least one customer")
        bad = self.drone_eligible - set(range(1, self.n + 1))
        if bad:
            raise ValueError(f"drone_eligible contains non-customer ids: {sorted(bad)}")

    @property
    def n(self) -> int:
        return len(self.points) - 1

    @property
    def depot_end(self) -> int:
        return self.n + 1

    @property
    def customers(self) -> range:
        return range(1, self.n + 1)

    def point(self, node: int) -> Point:
        return self.points[0] if node == self.depot_end else self.points[node]

    @cached_property
    def matrices(self) -> Matrices:
        return build_matrices(self)


def build_matrices(instance: Instance) -> Matrices:
    """Exact distance and travel-time matrices over node ids 0..n+1."""
    n = instance.n
    pts = [instance.point(i) for i in range(n + 2)]
    xs = np.array([p.x for p in pts])
    ys = np.array([p.y for p in pts])
    dx = xs[:, None] - xs[None, :]
    dy = ys[:, None] - ys[None, :]

    def dist(metric: Metric) -> np.ndarray:
        if metric is Metric.MANHATTAN:
            return np.abs(dx) + np.abs(dy)
        return np.hypot(dx, dy)

    p = instance.params
    d = dist(p.truck_metric)
    d_drone = dist(p.drone_metric)
    tau = d / p.truck_speed * 60.0
    tau_drone = d_drone / p.drone_speed * 60.0
    for arr in (d, d_drone, tau, tau_drone):
        arr.flags.writeable = False
    return Matrices(d=d, d_drone=d_drone, tau=tau, tau_drone=tau_drone)


@dataclass(frozen=True, order=True)
class DroneDelivery:
    """One sortie: launch at ``launch``, serve ``customer``, rejoin at ``rendezvous``."""

    launch: int
    customer: int
    rendezvous: int

    def __iter__(self) -> Iterator[int]:
        return iter((self.launch, self.customer, self.rendezvous))


@dataclass(frozen=True)
class Solution:
    """A truck tour plus a set of drone sorties."""

    truck_tour: tuple[int, ...]
    deliveries: frozenset[DroneDelivery]

    def __init__(self, truck_tour: Iterable[int], deliveries: Iterable[DroneDelivery] = ()):
        object.__setattr__(self, "truck_tour", tuple(truck_tour))
        object.__setattr__(self, "deliveries", frozenset(deliveries))

    def sorted_deliveries(self) -> list[DroneDelivery]:
        return sorted(self.deliveries)


def is_feasible_delivery(instance: Instance, launch: int, customer: int, rendezvous: int) -> bool:
    """Membership test for the set of endurance-feasible sorties.

    Launches are allowed from the depot (node 0) but never from the end
    depot; rendezvous may happen at the end depot but never at node 0.
    """
    n = instance.n
    if customer not in instance.drone_eligible:
        return False
    if launch == customer or customer == rendezvous or launch == rendezvous:
        return False
    if not (0 <= launch <= n):
        return False
    if not (1 <= rendezvous <= n + 1):
        return False
    td = instance.matrices.tau_drone
    return td[launch, customer] + td[customer, rendezvous] <= instance.params.endurance


def enumerate_feasible_deliveries(instance: Instance) -> set[DroneDelivery]:
    """All endurance-feasible sorties on the instance (can be large)."""
    n = instance.n
    td = instance.matrices.tau_drone
    eps = instance.params.endurance
    out: set[DroneDelivery] = set()
    for j in sorted(instance.drone_eligible):
        for i in range(0, n + 1):
            if i == j:
                continue
            leg1 = td[i, j]
            if leg1 > eps:
                continue
            for k in range(1, n + 2):
                if k == j or k == i:
                    continue
                if leg1 + td[j, k] <= eps:
                    out.add(DroneDelivery(i, j, k))
    return out


def count_feasible_deliveries(instance: Instance) -> int:
    """Size of the feasible-sortie set, computed without materializing it."""
    n = instance.n
    td = instance.matrices.tau_drone
    eps = instance.params.endurance
    eligible = np.array(sorted(instance.drone_eligible), dtype=int)
    if eligible.size == 0:
        return 0
    launches = np.arange(0, n + 1)
    rendezvous = np.arange(1, n + 2)
    total = 0
    for j in eligible:
        leg1 = td[launches, j]
        leg2 = td[j, rendezvous]
        ok = leg1[:, None] + leg2[None, :] <= eps
        ok &= launches[:, None] != j
        ok &= rendezvous[None, :] != j
        ok &= launches[:, None] != rendezvous[None, :]
        total += int(ok.sum())
    return total
