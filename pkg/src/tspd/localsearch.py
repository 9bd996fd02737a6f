"""Neighbourhood operators and a best-improvement descent.

Four moves are available on a feasible solution:

  relocate_truck   move a truck-only customer elsewhere in the tour
  relocate_drone   turn a truck-only customer into a sortie, or re-home an
                   existing sortie between new launch/rendezvous stops
  remove_drone     dissolve a sortie and put its customer back on the tour
  two_exchange     swap the roles of two customers (truck/truck,
                   drone/drone or truck/drone)

``improve`` repeatedly applies the best strictly improving move over the
union of the four neighbourhoods until none remains; only feasible moves are
candidates.  The public operator functions return a validated solution or
``None`` when a move is not applicable.  The descent itself scores moves
incrementally: the objective decomposes into base arc terms over the truck
tour plus one extra term per sortie driven by the truck elapsed time T
across the sortie span, the drone flight time D and the drone distance, so
a move's delta only involves the arcs it touches and the sorties whose
span, anchors or customer it changes.  The test suite checks these deltas
against full re-evaluation.
"""

from __future__ import annotations

from math import inf

import numpy as np

from .evaluation import Objective, validate
from .model import DroneDelivery, Instance, Solution

__all__ = [
    "relocate_truck",
    "relocate_drone",
    "remove_drone",
    "two_exchange",
    "apply_move",
    "best_move",
    "improve",
    "OPERATOR_ORDER",
]

OPERATOR_ORDER = ("relocate_truck", "relocate_drone", "remove_drone", "two_exchange")
_EPS = 1e-9


# --------------------------------------------------------------------------
# Canonical single-move operators
# --------------------------------------------------------------------------

def _roles(solution: Solution) -> tuple[set[int], set[int], set[int]]:
    launches = {d.launch for d in solution.deliveries}
    rendezvouses = {d.rendezvous for d in solution.deliveries}
    drone_nodes = {d.customer for d in solution.deliveries}
    return launches, rendezvouses, drone_nodes


def _checked(instance: Instance, candidate: Solution) -> Solution | None:
    return candidate if not validate(instance, candidate) else None


def relocate_truck(solution: Solution, instance: Instance, a: int, b: int) -> Solution | None:
    """Move truck-only customer ``a`` immediately before tour node ``b``."""
    td = list(solution.truck_tour)
    launches, rendezvouses, _ = _roles(solution)
    if a not in td or a in launches or a in rendezvouses or a in (0, instance.depot_end):
        return None
    if b == a or b == 0 or b not in td:
        return None
    td.remove(a)
    td.insert(td.index(b), a)
    return _checked(instance, Solution(td, solution.deliveries))


def relocate_drone(solution: Solution, instance: Instance, a: int, i: int, k: int) -> Solution | None:
    """Make ``a`` the drone customer of a new sortie from ``i`` to ``k``."""
    td = list(solution.truck_tour)
    launches, rendezvouses, drone_nodes = _roles(solution)
    if a in (0, instance.depot_end) or a in launches or a in rendezvouses:
        return None
    deliveries = set(solution.deliveries)
    if a in drone_nodes:
        deliveries = {d for d in deliveries if d.customer != a}
    elif a in td:
        td.remove(a)
    else:
        return None
    if i == a or k == a or i not in td or k not in td:
        return None
    if td.index(i) >= td.index(k):
        return None
    deliveries.add(DroneDelivery(i, a, k))
    return _checked(instance, Solution(td, deliveries))


def remove_drone(solution: Solution, instance: Instance, j: int, k: int) -> Solution | None:
    """Dissolve the sortie serving ``j`` and insert ``j`` before tour node ``k``."""
    td = list(solution.truck_tour)
    match = [d for d in solution.deliveries if d.customer == j]
    if not match or k == 0 or k not in td:
        return None
    deliveries = set(solution.deliveries) - {match[0]}
    td.insert(td.index(k), j)
    return _checked(instance, Solution(td, deliveries))


def two_exchange(solution: Solution, instance: Instance, a: int, b: int) -> Solution | None:
    """Swap the positions/roles of customers ``a`` and ``b``."""
    if a == b or a in (0, instance.depot_end) or b in (0, instance.depot_end):
        return None
    td = list(solution.truck_tour)
    _, _, drone_nodes = _roles(solution)
    a_drone, b_drone = a in drone_nodes, b in drone_nodes
    if not a_drone and a not in td:
        return None
    if not b_drone and b not in td:
        return None

    deliveries = list(solution.deliveries)
    if a_drone and b_drone:
        deliveries = [
            DroneDelivery(d.launch, b if d.customer == a else a if d.customer == b else d.customer, d.rendezvous)
            for d in deliveries
        ]
        return _checked(instance, Solution(td, deliveries))

    if a_drone != b_drone:
        t, dnode = (b, a) if a_drone else (a, b)
        # the drone customer takes t's tour slot; t flies in its place; any
        # sortie anchored at t re-points to the new occupant
        td[td.index(t)] = dnode
        deliveries = [
            DroneDelivery(
                dnode if d.launch == t else d.launch,
                t if d.customer == dnode else d.customer,
                dnode if d.rendezvous == t else d.rendezvous,
            )
            for d in deliveries
        ]
        return _checked(instance, Solution(td, deliveries))

    pa, pb = td.index(a), td.index(b)
    td[pa], td[pb] = b, a
    swap = {a: b, b: a}
    deliveries = [
        DroneDelivery(swap.get(d.launch, d.launch), d.customer, swap.get(d.rendezvous, d.rendezvous))
        for d in deliveries
    ]
    return _checked(instance, Solution(td, deliveries))


_OPERATOR_FUNCS = {
    "relocate_truck": relocate_truck,
    "relocate_drone": relocate_drone,
    "remove_drone": remove_drone,
    "two_exchange": two_exchange,
}


def apply_move(solution: Solution, instance: Instance, move: tuple) -> Solution | None:
    name, *args = move
    return _OPERATOR_FUNCS[name](solution, instance, *args)


# --------------------------------------------------------------------------
# Incremental state for the descent
# --------------------------------------------------------------------------

class _State:
    """Array/list view of a feasible solution, reloadable between moves."""

    def __init__(self, instance: Instance, solution: Solution, objective: Objective):
        self.instance = instance
        self.objective = objective
        self.min_time = objective is Objective.MIN_TIME
        p = instance.params
        m = instance.matrices
        self.d = m.d
        self.t = m.tau
        self.dd = m.d_drone
        self.td_mat = m.tau_drone
        # plain-list mirrors for the scalar hot paths
        self.dl = m.d.tolist()
        self.tl = m.tau.tolist()
        self.ddl = m.d_drone.tolist()
        self.tdl_m = m.tau_drone.tolist()
        self.eps = p.endurance
        self.c1, self.c2, self.alpha, self.beta = p.c1, p.c2, p.alpha, p.beta
        self.s_service = p.s_retrieve + p.s_launch
        self.eligible = np.zeros(instance.n + 2, dtype=bool)
        for c in instance.drone_eligible:
            self.eligible[c] = True
        self.eligible_l = self.eligible.tolist()
        self.load(solution)

    def load(self, solution: Solution) -> None:
        self.solution = solution
        td = np.array(solution.truck_tour, dtype=int)
        self.tda = td
        self.tdl = [int(e) for e in solution.truck_tour]
        self.L = L = len(td)
        self.pos = np.full(self.instance.n + 2, -1, dtype=int)
        self.pos[td] = np.arange(L)
        self.step_d = self.d[td[:-1], td[1:]]
        self.step_t = self.t[td[:-1], td[1:]]
        self.pref_t = np.concatenate(([0.0], np.cumsum(self.step_t)))
        self.base_total = float(np.sum(self.step_t if self.min_time else self.c1 * self.step_d))

        wins = sorted(solution.deliveries, key=lambda dd: self.pos[dd.launch])
        self.windows = wins
        W = len(wins)
        self.wi = np.array([self.pos[w.launch] for w in wins], dtype=int)
        self.wk = np.array([self.pos[w.rendezvous] for w in wins], dtype=int)
        self.wj = np.array([w.customer for w in wins], dtype=int)
        if W:
            self.wT = self.pref_t[self.wk] - self.pref_t[self.wi]
            launch_nodes = td[self.wi]
            rdv_nodes = td[self.wk]
            self.wD = self.td_mat[launch_nodes, self.wj] + self.td_mat[self.wj, rdv_nodes]
            self.wdd = self.dd[launch_nodes, self.wj] + self.dd[self.wj, rdv_nodes]
        else:
            self.wT = np.zeros(0)
            self.wD = np.zeros(0)
            self.wdd = np.zeros(0)
        self.wextra = self.extra(self.wT, self.wD, self.wdd)
        self.wi_l = self.wi.tolist()
        self.wk_l = self.wk.tolist()
        self.wj_l = self.wj.tolist()
        self.wT_l = self.wT.tolist()
        self.wextra_l = self.wextra.tolist()

        self.arc_win = np.full(max(L - 1, 0), -1, dtype=int)
        for widx in range(W):
            self.arc_win[self.wi[widx] : self.wk[widx]] = widx
        self.arc_win_l = self.arc_win.tolist()
        self.is_launch = np.zeros(L, dtype=bool)
        self.is_rdv = np.zeros(L, dtype=bool)
        self.is_launch[self.wi] = True
        self.is_rdv[self.wk] = True
        self.launch_win = np.full(L, -1, dtype=int)
        self.rdv_win = np.full(L, -1, dtype=int)
        self.launch_win[self.wi] = np.arange(W)
        self.rdv_win[self.wk] = np.arange(W)
        self.launch_win_l = self.launch_win.tolist()
        self.rdv_win_l = self.rdv_win.tolist()
        self.plain = np.array(
            [pp for pp in range(1, L - 1) if not self.is_launch[pp] and not self.is_rdv[pp]],
            dtype=int,
        )
        self.endpoints = [pp for pp in range(1, L - 1) if self.is_launch[pp] or self.is_rdv[pp]]

    @property
    def value(self) -> float:
        return self.base_total + float(np.sum(self.wextra))

    # --- leaf formulas ------------------------------------------------------

    def extra(self, T, D, dronedist):
        if self.min_time:
            return np.maximum(0.0, D - T) + self.s_service
        return (
            self.c2 * dronedist
            + self.alpha * np.maximum(0.0, D - T)
            + self.beta * np.maximum(0.0, T - D)
        )

    def extra_s(self, T: float, D: float, dronedist: float) -> float:
        if self.min_time:
            return max(0.0, D - T) + self.s_service
        return (
            self.c2 * dronedist
            + self.alpha * max(0.0, D - T)
            + self.beta * max(0.0, T - D)
        )

    def base(self, dist, time):
        return time if self.min_time else self.c1 * dist

    def detour(self, p: int, node) -> tuple[float, float]:
        u, v = self.tdl[p - 1], self.tdl[p + 1]
        return (
            self.dl[u][node] + self.dl[node][v] - self.dl[u][v],
            self.tl[u][node] + self.tl[node][v] - self.tl[u][v],
        )

    def win_delta(self, widx: int, dT: float = 0.0, D: float | None = None, dronedist: float | None = None) -> float:
        T = self.wT_l[widx] + dT
        Dv = self.wD[widx] if D is None else D
        ddv = self.wdd[widx] if dronedist is None else dronedist
        return self.extra_s(T, float(Dv), float(ddv)) - self.wextra_l[widx]


# --------------------------------------------------------------------------
# Vectorized neighbourhood scans; each returns (delta, move) or (inf, None).
# Candidates are laid out in a fixed order so float ties break the same way
# on every run.
# --------------------------------------------------------------------------

def _scan_relocate_truck(st: _State):
    L = st.L
    P = st.plain
    if L < 4 or P.size == 0:
        return inf, None
    td = st.tda
    q = np.arange(1, L)
    prev_base = td[q - 1]
    tgt = td[q]
    A = P.size
    nodes = td[P]

    # removal constants per candidate
    rem_d = np.empty(A)
    rem_t = np.empty(A)
    w_old = st.arc_win[P - 1]
    for idx in range(A):
        rd, rt = st.detour(int(P[idx]), int(nodes[idx]))
        rem_d[idx] = rd
        rem_t[idx] = rt
    rem_base = -(rem_t if st.min_time else st.c1 * rem_d)
    d_old = np.zeros(A)
    for idx in range(A):
        if w_old[idx] >= 0:
            d_old[idx] = st.win_delta(int(w_old[idx]), dT=-float(rem_t[idx]))

    # insertion grids: row = candidate, column = insert before tour position q
    # (slots whose predecessor is the candidate itself are masked below)
    prev = prev_base[None, :]
    ins_d = st.d[prev, nodes[:, None]] + st.d[nodes[:, None], tgt[None, :]] - st.d[prev, tgt[None, :]]
    ins_t = st.t[prev, nodes[:, None]] + st.t[nodes[:, None], tgt[None, :]] - st.t[prev, tgt[None, :]]
    delta = rem_base[:, None] + (ins_t if st.min_time else st.c1 * ins_d)

    w_ins = np.repeat(st.arc_win[q - 1][None, :], A, axis=0)
    same = w_ins == w_old[:, None]
    delta += np.where(same, 0.0, d_old[:, None])
    active = w_ins >= 0
    if active.any():
        wsel = np.where(active, w_ins, 0)
        dT = ins_t + np.where(same, -rem_t[:, None], 0.0)
        d_ins = st.extra(st.wT[wsel] + dT, st.wD[wsel], st.wdd[wsel]) - st.wextra[wsel]
        delta += np.where(active, d_ins, 0.0)

    block = (q[None, :] == P[:, None]) | (q[None, :] == P[:, None] + 1)
    delta[block] = inf
    flat = int(np.argmin(delta))
    r, c = divmod(flat, q.size)
    val = float(delta[r, c])
    if not np.isfinite(val):
        return inf, None
    return val, ("relocate_truck", int(nodes[r]), int(td[q[c]]))


def _corridors(arc_win) -> list[tuple[int, int]]:
    """Maximal position ranges [lo, hi] whose arcs carry no sortie."""
    out = []
    L1 = len(arc_win)
    p = 0
    while p < L1:
        if arc_win[p] >= 0:
            p += 1
            continue
        lo = p
        while p < L1 and arc_win[p] < 0:
            p += 1
        out.append((lo, p))
    return out


def _pairs_of(corridors: list[tuple[int, int]]):
    pis, pks = [], []
    for lo, hi in corridors:
        ps = np.arange(lo, hi + 1)
        if ps.size < 2:
            continue
        gi, gk = np.meshgrid(ps, ps, indexing="ij")
        m = gi < gk
        pis.append(gi[m])
        pks.append(gk[m])
    if not pis:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    return np.concatenate(pis), np.concatenate(pks)


def _best_new_window(st: _State, pis, pks, cand_nodes, cand_pos, extra_rm, base_rm, detour_t_of):
    """Best (pair, candidate) choice for opening a new sortie window.

    ``cand_pos[c] >= 0`` marks candidates currently on the tour (they leave
    it, shortening spans that straddle their slot by ``detour_t_of[c]``).
    ``extra_rm``/``base_rm`` are per-candidate constants for leaving the
    current role.  Returns ``(delta, pair_index, cand_index)``.
    """
    if pis.size == 0 or cand_nodes.size == 0:
        return inf, -1, -1
    inode = st.tda[pis]
    knode = st.tda[pks]
    flight = st.td_mat[inode[:, None], cand_nodes[None, :]] + st.td_mat[cand_nodes[None, :], knode[:, None]]
    ok = flight <= st.eps
    ok &= st.eligible[cand_nodes][None, :]
    on_tour = cand_pos >= 0
    if on_tour.any():
        ok &= pis[:, None] != cand_pos[None, :]
        ok &= pks[:, None] != cand_pos[None, :]
    if not ok.any():
        return inf, -1, -1
    ddist = st.dd[inode[:, None], cand_nodes[None, :]] + st.dd[cand_nodes[None, :], knode[:, None]]
    T = (st.pref_t[pks] - st.pref_t[pis])[:, None]
    if on_tour.any():
        inside = (pis[:, None] < cand_pos[None, :]) & (cand_pos[None, :] < pks[:, None])
        T = T - np.where(inside, detour_t_of[None, :], 0.0)
    extra_new = st.extra(T, flight, ddist)
    delta = np.where(ok, extra_new + extra_rm[None, :] + base_rm[None, :], inf)
    flat = int(np.argmin(delta))
    r, c = divmod(flat, cand_nodes.size)
    val = float(delta[r, c])
    if not np.isfinite(val):
        return inf, -1, -1
    return val, r, c


def _scan_relocate_drone(st: _State):
    best = (inf, None)
    td = st.tda
    base_corr = _corridors(st.arc_win_l)
    pis, pks = _pairs_of(base_corr)

    # truck-only candidates, batched over (pair, candidate)
    P = st.plain
    if P.size and pis.size:
        nodes = td[P]
        A = P.size
        base_rm = np.empty(A)
        extra_rm = np.zeros(A)
        det_t = np.empty(A)
        for idx in range(A):
            rd, rt = st.detour(int(P[idx]), int(nodes[idx]))
            det_t[idx] = rt
            base_rm[idx] = -(rt if st.min_time else st.c1 * rd)
            w_old = st.arc_win_l[P[idx] - 1]
            if w_old >= 0:
                extra_rm[idx] = st.win_delta(w_old, dT=-rt)
        val, r, c = _best_new_window(st, pis, pks, nodes, P, extra_rm, base_rm, det_t)
        if val < best[0]:
            best = (val, ("relocate_drone", int(nodes[c]), int(td[pis[r]]), int(td[pks[r]])))

    # existing drone customers, re-homed; their own span becomes free space
    for widx, w in enumerate(st.windows):
        lo_w, hi_w = st.wi_l[widx], st.wk_l[widx]
        lo = lo_w
        hi = hi_w
        for clo, chi in base_corr:  # corridors touching the freed span merge
            if chi == lo_w:
                lo = clo
            if clo == hi_w:
                hi = chi
        ps = np.arange(lo, hi + 1)
        gi, gk = np.meshgrid(ps, ps, indexing="ij")
        mask = gi < gk
        # drop pairs fully inside an old corridor; those are already in pis/pks
        mask &= ~((gk <= lo_w) | (gi >= hi_w))
        pis2 = np.concatenate([pis, gi[mask]])
        pks2 = np.concatenate([pks, gk[mask]])
        if pis2.size == 0:
            continue
        val, r, _ = _best_new_window(
            st,
            pis2,
            pks2,
            np.array([w.customer]),
            np.array([-1]),
            np.array([-st.wextra_l[widx]]),
            np.zeros(1),
            np.zeros(1),
        )
        if val < best[0]:
            best = (val, ("relocate_drone", w.customer, int(td[pis2[r]]), int(td[pks2[r]])))
    return best


def _scan_remove_drone(st: _State):
    best = (inf, None)
    td = st.tda
    L = st.L
    q = np.arange(1, L)
    prev = td[q - 1]
    tgt = td[q]
    for widx, w in enumerate(st.windows):
        j = w.customer
        ins_d = st.d[prev, j] + st.d[j, tgt] - st.d[prev, tgt]
        ins_t = st.t[prev, j] + st.t[j, tgt] - st.t[prev, tgt]
        delta = (ins_t if st.min_time else st.c1 * ins_d) - st.wextra_l[widx]
        w_ins = st.arc_win[q - 1].copy()
        w_ins[w_ins == widx] = -1
        active = w_ins >= 0
        if active.any():
            wsel = np.where(active, w_ins, 0)
            d_ins = st.extra(st.wT[wsel] + ins_t, st.wD[wsel], st.wdd[wsel]) - st.wextra[wsel]
            delta = delta + np.where(active, d_ins, 0.0)
        qq = int(np.argmin(delta))
        if delta[qq] < best[0]:
            best = (float(delta[qq]), ("remove_drone", j, int(td[q[qq]])))
    return best


def _swap_delta_scalar(st: _State, pa: int, pb: int) -> float:
    """Exact delta of swapping the occupants of tour positions pa < pb,
    allowing sortie anchors (their sorties re-point to the new occupants)."""
    td = st.tdl
    dl, tl = st.dl, st.tl
    a, b = td[pa], td[pb]
    if pb == pa + 1:
        u, v = td[pa - 1], td[pb + 1]
        changed = (
            (pa - 1, dl[u][b] - dl[u][a], tl[u][b] - tl[u][a]),
            (pb, dl[a][v] - dl[b][v], tl[a][v] - tl[b][v]),
        )
    else:
        u1, v1 = td[pa - 1], td[pa + 1]
        u2, v2 = td[pb - 1], td[pb + 1]
        changed = (
            (pa - 1, dl[u1][b] - dl[u1][a], tl[u1][b] - tl[u1][a]),
            (pa, dl[b][v1] - dl[a][v1], tl[b][v1] - tl[a][v1]),
            (pb - 1, dl[u2][a] - dl[u2][b], tl[u2][a] - tl[u2][b]),
            (pb, dl[a][v2] - dl[b][v2], tl[a][v2] - tl[b][v2]),
        )
    delta = 0.0
    if st.min_time:
        for _, _, dt in changed:
            delta += dt
    else:
        for _, ddist, _ in changed:
            delta += ddist
        delta *= st.c1

    affected = set()
    aw = st.arc_win_l
    for pos, _, _ in changed:
        wdx = aw[pos]
        if wdx >= 0:
            affected.add(wdx)
    for p in (pa, pb):
        if st.launch_win_l[p] >= 0:
            affected.add(st.launch_win_l[p])
        if st.rdv_win_l[p] >= 0:
            affected.add(st.rdv_win_l[p])
    tdl_m, ddl = st.tdl_m, st.ddl
    for wdx in affected:
        lo, hi = st.wi_l[wdx], st.wk_l[wdx]
        dT = 0.0
        for pos, _, dt in changed:
            if lo <= pos < hi:
                dT += dt
        inode = b if lo == pa else a if lo == pb else td[lo]
        knode = b if hi == pa else a if hi == pb else td[hi]
        j = st.wj_l[wdx]
        D = tdl_m[inode][j] + tdl_m[j][knode]
        if D > st.eps:
            return inf
        delta += st.extra_s(st.wT_l[wdx] + dT, D, ddl[inode][j] + ddl[j][knode]) - st.wextra_l[wdx]
    return delta


def _truck_drone_swap_scalar(st: _State, widx: int, pa: int) -> float:
    """Delta of swapping the occupant of ``pa`` with the drone customer of
    window ``widx``; the occupant becomes the drone customer."""
    td = st.tdl
    a = td[pa]
    if not st.eligible_l[a]:
        return inf
    dn = st.wj_l[widx]
    dl, tl = st.dl, st.tl
    u, v = td[pa - 1], td[pa + 1]
    changed = (
        (pa - 1, dl[u][dn] - dl[u][a], tl[u][dn] - tl[u][a]),
        (pa, dl[dn][v] - dl[a][v], tl[dn][v] - tl[a][v]),
    )
    delta = 0.0
    if st.min_time:
        for _, _, dt in changed:
            delta += dt
    else:
        for _, ddist, _ in changed:
            delta += ddist
        delta *= st.c1

    affected = {widx}
    aw = st.arc_win_l
    for pos, _, _ in changed:
        if aw[pos] >= 0:
            affected.add(aw[pos])
    if st.launch_win_l[pa] >= 0:
        affected.add(st.launch_win_l[pa])
    if st.rdv_win_l[pa] >= 0:
        affected.add(st.rdv_win_l[pa])
    tdl_m, ddl = st.tdl_m, st.ddl
    for wdx in affected:
        lo, hi = st.wi_l[wdx], st.wk_l[wdx]
        dT = 0.0
        for pos, _, dt in changed:
            if lo <= pos < hi:
                dT += dt
        inode = dn if lo == pa else td[lo]
        knode = dn if hi == pa else td[hi]
        j = a if wdx == widx else st.wj_l[wdx]
        D = tdl_m[inode][j] + tdl_m[j][knode]
        if D > st.eps:
            return inf
        delta += st.extra_s(st.wT_l[wdx] + dT, D, ddl[inode][j] + ddl[j][knode]) - st.wextra_l[wdx]
    return delta


def _scan_two_exchange(st: _State):
    best = (inf, None)
    td = st.tda
    L = st.L

    # truck x truck, both plain and non-adjacent: full matrix evaluation
    P = st.plain
    if P.size >= 2:
        nodes = td[P]
        u = td[P - 1]
        v = td[P + 1]
        new_d = st.d[u[:, None], nodes[None, :]] + st.d[nodes[None, :], v[:, None]]
        new_t = st.t[u[:, None], nodes[None, :]] + st.t[nodes[None, :], v[:, None]]
        old_d = st.d[u, nodes] + st.d[nodes, v]
        old_t = st.t[u, nodes] + st.t[nodes, v]
        A_d = new_d - old_d[:, None]  # change at row position for column occupant
        A_t = new_t - old_t[:, None]
        base = (A_t + A_t.T) if st.min_time else st.c1 * (A_d + A_d.T)

        w_at = st.arc_win[P - 1]
        has = w_at >= 0
        if len(st.windows) and has.any():
            wsel = np.where(has, w_at, 0)
            Tw = st.wT[wsel]
            Dw = st.wD[wsel]
            ddw = st.wdd[wsel]
            ew = st.wextra[wsel]
            term = st.extra(Tw[:, None] + A_t, Dw[:, None], ddw[:, None]) - ew[:, None]
            both_same = (w_at[:, None] == w_at[None, :]) & has[:, None]
            combined = st.extra(Tw[:, None] + A_t + A_t.T, Dw[:, None], ddw[:, None]) - ew[:, None]
            wdelta = np.where(
                both_same,
                combined,
                np.where(has[:, None], term, 0.0) + np.where(has[None, :], term.T, 0.0),
            )
            delta = base + wdelta
        else:
            delta = base
        iu = np.triu_indices(P.size, k=1)
        mask_adj = P[iu[1]] == P[iu[0]] + 1  # adjacent swaps handled below
        vals = delta[iu]
        vals = np.where(mask_adj, inf, vals)
        if vals.size:
            flat = int(np.argmin(vals))
            if vals[flat] < best[0]:
                r, c = iu[0][flat], iu[1][flat]
                best = (float(vals[flat]), ("two_exchange", int(nodes[r]), int(nodes[c])))

    # adjacent plain pairs and every pair touching a sortie anchor
    plain_set = set(st.plain.tolist())
    for p in range(1, L - 2):
        if p in plain_set and (p + 1) in plain_set:
            dlt = _swap_delta_scalar(st, p, p + 1)
            if dlt < best[0]:
                best = (dlt, ("two_exchange", int(td[p]), int(td[p + 1])))
    endpoint_set = set(st.endpoints)
    for pe in st.endpoints:
        for q2 in range(1, L - 1):
            if q2 == pe or (q2 in endpoint_set and q2 < pe):
                continue
            pa, pb = (pe, q2) if pe < q2 else (q2, pe)
            dlt = _swap_delta_scalar(st, pa, pb)
            if dlt < best[0]:
                best = (dlt, ("two_exchange", int(td[pa]), int(td[pb])))

    # drone x drone
    W = len(st.windows)
    for xw in range(W):
        for yw in range(xw + 1, W):
            jx, jy = st.wj_l[xw], st.wj_l[yw]
            ix, kx = st.tdl[st.wi_l[xw]], st.tdl[st.wk_l[xw]]
            iy, ky = st.tdl[st.wi_l[yw]], st.tdl[st.wk_l[yw]]
            Dx = st.tdl_m[ix][jy] + st.tdl_m[jy][kx]
            Dy = st.tdl_m[iy][jx] + st.tdl_m[jx][ky]
            if Dx > st.eps or Dy > st.eps:
                continue
            dlt = st.win_delta(xw, D=Dx, dronedist=st.ddl[ix][jy] + st.ddl[jy][kx]) + st.win_delta(
                yw, D=Dy, dronedist=st.ddl[iy][jx] + st.ddl[jx][ky]
            )
            if dlt < best[0]:
                best = (float(dlt), ("two_exchange", min(jx, jy), max(jx, jy)))

    # truck x drone
    for widx in range(W):
        dnode = st.wj_l[widx]
        for pa in range(1, L - 1):
            dlt = _truck_drone_swap_scalar(st, widx, pa)
            if dlt < best[0]:
                best = (float(dlt), ("two_exchange", int(td[pa]), dnode))
    return best


_SCANS = {
    "relocate_truck": _scan_relocate_truck,
    "relocate_drone": _scan_relocate_drone,
    "remove_drone": _scan_remove_drone,
    "two_exchange": _scan_two_exchange,
}


def _best_move_on(st: _State, operators: tuple[str, ...]) -> tuple[float, tuple | None]:
    best_delta, best_mv = inf, None
    for name in operators:
        delta, mv = _SCANS[name](st)
        if mv is not None and delta < best_delta:
            best_delta, best_mv = delta, mv
    return best_delta, best_mv


def best_move(
    solution: Solution,
    instance: Instance,
    objective: Objective = Objective.MIN_COST,
    operators: tuple[str, ...] = OPERATOR_ORDER,
) -> tuple[float, tuple | None]:
    """Best move over the requested neighbourhoods (delta, move descriptor)."""
    return _best_move_on(_State(instance, solution, objective), operators)


def improve(
    solution: Solution,
    instance: Instance,
    objective: Objective = Objective.MIN_COST,
    operators: tuple[str, ...] = OPERATOR_ORDER,
) -> Solution:
    """Best-improvement descent until no move strictly improves."""
    st = _State(instance, solution, objective)
    current = solution
    while True:
        delta, mv = _best_move_on(st, operators)
        if mv is None or delta >= -_EPS:
            return current
        nxt = apply_move(current, instance, mv)
        if nxt is None:
            raise RuntimeError(f"scan proposed an infeasible move: {mv}")
        current = nxt
        st.load(current)
