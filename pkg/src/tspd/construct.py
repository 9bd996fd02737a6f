"""Randomized giant-tour constructors plus exact and reference TSP tours.

All constructors emit a tour ``[0, c_1, ..., c_n, n + 1]`` over every
customer, measured with the truck metric.  Ranking ties break toward the
lower node id so a fixed seed yields a fixed tour.
"""

from __future__ import annotations

import numpy as np

from .model import Instance

__all__ = [
    "k_nearest_neighbour",
    "k_cheapest_insertion",
    "random_insertion",
    "exact_tsp",
    "tsp_reference",
    "two_opt",
    "tour_length",
    "CONSTRUCTORS",
]

EXACT_TSP_MAX_N = 15


def tour_length(instance: Instance, tour: list[int]) -> float:
    d = instance.matrices.d
    return float(sum(d[a, b] for a, b in zip(tour, tour[1:])))


def k_nearest_neighbour(instance: Instance, k: int, rng: np.random.Generator) -> list[int]:
    """Grow the tour from the depot, each step visiting one of the k nearest
    unvisited customers, chosen uniformly."""
    if k < 1:
        raise ValueError("k must be >= 1")
    d = instance.matrices.d
    unvisited = list(instance.customers)
    tour = [0]
    while unvisited:
        cur = tour[-1]
        order = sorted(unvisited, key=lambda c: (d[cur, c], c))
        pool = order[: min(k, len(order))]
        nxt = pool[0] if len(pool) == 1 else pool[int(rng.integers(len(pool)))]
        tour.append(nxt)
        unvisited.remove(nxt)
    tour.append(instance.depot_end)
    return tour


def k_cheapest_insertion(instance: Instance, k: int, rng: np.random.Generator) -> list[int]:
    """Cyclic cheapest insertion starting from the depot alone; each step
    inserts one of the k cheapest (node, edge) pairs, chosen uniformly."""
    if k < 1:
        raise ValueError("k must be >= 1")
    d = instance.matrices.d
    tour = [0]
    unvisited = sorted(instance.customers)
    while unvisited:
        v_arr = np.array(unvisited)
        nxt = tour[1:] + tour[:1]
        ic = d[np.ix_(tour, v_arr)] + d[np.ix_(nxt, v_arr)] - d[tour, nxt][:, None]
        # candidates ranked by (cost, node id, edge position)
        flat = ic.T.ravel()  # node-major so ties prefer the lower node id
        m = min(k, flat.size)
        if m == flat.size:
            top = np.arange(flat.size)
        else:
            top = np.argpartition(flat, m - 1)[:m]
        top = top[np.lexsort((top, flat[top]))]
        pick = top[0] if m == 1 else top[int(rng.integers(m))]
        node = unvisited[int(pick) // len(tour)]
        edge = int(pick) % len(tour)
        tour.insert(edge + 1, node)
        unvisited.remove(node)
    tour.append(instance.depot_end)
    return tour


def random_insertion(instance: Instance, rng: np.random.Generator) -> list[int]:
    """Insert a uniformly random unvisited customer at its cheapest position."""
    d = instance.matrices.d
    tour = [0]
    unvisited = sorted(instance.customers)
    while unvisited:
        node = unvisited[int(rng.integers(len(unvisited)))] if len(unvisited) > 1 else unvisited[0]
        nxt = tour[1:] + tour[:1]
        ic = d[tour, node] + d[nxt, node] - d[tour, nxt]
        edge = int(np.argmin(ic))
        tour.insert(edge + 1, node)
        unvisited.remove(node)
    tour.append(instance.depot_end)
    return tour


def exact_tsp(instance: Instance) -> list[int]:
    """Provably optimal truck-metric tour by dynamic programming over subsets.

    Usable up to ``EXACT_TSP_MAX_N`` customers; the fixed iteration order
    makes the returned tour deterministic when optima tie.
    """
    n = instance.n
    if n > EXACT_TSP_MAX_N:
        raise ValueError(f"exact_tsp handles at most {EXACT_TSP_MAX_N} customers, got n={n}")
    d = instance.matrices.d
    if n == 1:
        return [0, 1, 2]

    # dp[(mask, last)] = best cost of a path 0 -> ... -> last visiting mask
    dp: dict[tuple[int, int], float] = {}
    parent: dict[tuple[int, int], int] = {}
    for c in range(1, n + 1):
        dp[(1 << (c - 1), c)] = float(d[0, c])
        parent[(1 << (c - 1), c)] = 0
    full = (1 << n) - 1
    for mask in range(1, full + 1):
        for last in range(1, n + 1):
            key = (mask, last)
            if key not in dp:
                continue
            base = dp[key]
            for c in range(1, n + 1):
                bit = 1 << (c - 1)
                if mask & bit:
                    continue
                nk = (mask | bit, c)
                cand = base + float(d[last, c])
                if nk not in dp or cand < dp[nk]:
                    dp[nk] = cand
                    parent[nk] = last
    best, best_last = None, None
    for last in range(1, n + 1):
        cand = dp[(full, last)] + float(d[last, n + 1])
        if best is None or cand < best:
            best, best_last = cand, last
    tour = [best_last]
    mask = full
    while tour[-1] != 0:
        last = tour[-1]
        prev = parent[(mask, last)]
        mask ^= 1 << (last - 1)
        tour.append(prev)
    tour.reverse()
    tour.append(n + 1)
    return tour


def two_opt(instance: Instance, tour: list[int]) -> list[int]:
    """First-improvement 2-opt on the open tour until locally optimal."""
    d = instance.matrices.d
    tour = list(tour)
    L = len(tour)
    improved = True
    while improved:
        improved = False
        arr = np.array(tour)
        for i in range(0, L - 2):
            a, b = tour[i], tour[i + 1]
            # reversing tour[i+1 .. j] replaces arcs (a,b),(c,e) by (a,c),(b,e)
            cs = arr[i + 2 : L - 1]
            es = arr[i + 3 : L]
            delta = d[a, cs] + d[b, es] - d[a, b] - d[cs, es]
            j = int(np.argmin(delta)) if delta.size else 0
            if delta.size and delta[j] < -1e-12:
                jj = i + 2 + j
                tour[i + 1 : jj + 1] = reversed(tour[i + 1 : jj + 1])
                improved = True
                break
    return tour


def tsp_reference(instance: Instance, seed: int = 0, starts: int = 8) -> list[int]:
    """Best-known truck tour: exact below the DP limit, otherwise the best of
    several seeded constructions polished with 2-opt."""
    if instance.n <= EXACT_TSP_MAX_N:
        return exact_tsp(instance)
    best: list[int] | None = None
    best_len = float("inf")
    for s in range(starts):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(s,))))
        tour = k_nearest_neighbour(instance, 1 if s == 0 else 2, rng)
        tour = two_opt(instance, tour)
        length = tour_length(instance, tour)
        if length < best_len - 1e-12:
            best, best_len = tour, length
    assert best is not None
    return best


CONSTRUCTORS = {
    "nearest": k_nearest_neighbour,
    "cheapest": k_cheapest_insertion,
    "random": random_insertion,
}
