"""Mixed-integer model of the problem: assignment, checking and LP export.

The binary/continuous variable layout follows the classic two-index truck /
three-index sortie encoding: ``x[i][j]`` truck arcs, ``y[i][j][k]`` sorties
(index set restricted to endurance-feasible triples), ``p[i][j]`` visit
order indicators, ``u[i]`` tour positions, and per-node clocks ``t, tp``
(arrival of truck / drone), ``r, rp`` (departure) plus waits ``w, wp``.

Constraint ids run c2..c45 and are used both by ``check_constraints`` and as
row names in the exported LP file:

  c2        each customer served exactly once (truck arc in, or one sortie)
  c3, c4    truck leaves the start depot once / enters the end depot once
  c5        position consistency along truck arcs (subtour elimination)
  c6        truck flow conservation at customers
  c7, c8    sortie endpoints must lie on the truck route
  c9        launch precedes rendezvous in tour positions
  c10, c11  at most one launch / one rendezvous per node
  c12..c15  visit-order indicators consistent with positions
  c16       no launch inside another sortie's span
  c17, c18  truck arrival propagation along chosen arcs
  c19..c22  drone arrival propagation along chosen sorties
  c23, c24  the drone does not dwell at its customer
  c25, c26  departures cover arrival plus launch/retrieve service
  c27       sortie airborne time within endurance
  c28       waits nonnegative
  c29, c30  waits cover the arrival gap between the vehicles
  c31       no waiting at the start depot
  c32       truck and drone leave every node together
  c33..c36  clocks start at zero at the start depot
  c37..c39  x, y, p binary (y restricted to feasible triples)
  c40       the depot precedes every customer (p fixed to one)
  c41       position bounds
  c42..c45  clocks nonnegative

``check_constraints`` evaluates every row numerically.  By default c27 is
checked in its flight-time form (drone airborne legs within endurance),
which matches the feasibility model used by the solvers and the validator;
``strict_endurance_timing=True`` switches to the departure-clock form,
which additionally counts hover and retrieve time against endurance and can
therefore reject solutions the validator accepts.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import Instance, Solution, enumerate_feasible_deliveries

__all__ = [
    "MilpAssignment",
    "big_m_value",
    "assign_variables",
    "check_constraints",
    "objective_value",
    "write_lp",
    "lp_variable_count",
    "LP_MAX_N",
]

LP_MAX_N = 12


@dataclass
class MilpAssignment:
    n: int
    x: dict[tuple[int, int], int]
    y: dict[tuple[int, int, int], int]
    p: dict[tuple[int, int], int]
    u: np.ndarray
    t: np.ndarray
    tp: np.ndarray
    r: np.ndarray
    rp: np.ndarray
    w: np.ndarray
    wp: np.ndarray
    big_M: float


def big_m_value(instance: Instance) -> float:
    """Horizon bound: no clock can reach it on any solution, even one that
    waits through a full endurance window at every stop."""
    m = instance.matrices
    p = instance.params
    slowest = float(max(m.tau.max(), m.tau_drone.max()))
    return (instance.n + 2) * slowest + (instance.n + 1) * (p.endurance + p.s_launch + p.s_retrieve)


def assign_variables(instance: Instance, solution: Solution) -> MilpAssignment:
    """Map a solution (feasible or not) onto the full variable vector.

    Times follow the wall-clock schedule except that the model pins all
    clocks to zero at the start depot, so launch preparation for a sortie
    leaving node 0 is taken to happen before departure.
    """
    n = instance.n
    m = instance.matrices
    par = instance.params
    td = list(solution.truck_tour)
    x = {(a, b): 1 for a, b in zip(td, td[1:])}
    y = {(d.launch, d.customer, d.rendezvous): 1 for d in solution.deliveries}

    pos: dict[int, int] = {}
    for idx, node in enumerate(td):
        pos.setdefault(node, idx)
    launches = {d.launch: d for d in solution.deliveries}
    rendezvous = {d.rendezvous: d for d in solution.deliveries}

    u = np.zeros(n + 2)
    vpos: dict[int, float] = {}
    for node in range(n + 2):
        if node in pos:
            vpos[node] = float(pos[node])
        else:
            owner = next((d for d in solution.sorted_deliveries() if d.customer == node), None)
            if owner is not None and owner.launch in pos:
                vpos[node] = pos[owner.launch] + 0.5
            else:
                vpos[node] = 0.0
        u[node] = vpos[node]

    p_var: dict[tuple[int, int], int] = {}
    for j in range(1, n + 1):
        p_var[(0, j)] = 1
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                p_var[(i, j)] = 1 if (vpos[i], i) < (vpos[j], j) else 0

    t = np.zeros(n + 2)
    tp = np.zeros(n + 2)
    r = np.zeros(n + 2)
    rp = np.zeros(n + 2)
    w = np.zeros(n + 2)
    wp = np.zeros(n + 2)
    clock = 0.0
    for idx, node in enumerate(td):
        if idx > 0:
            clock += float(m.tau[td[idx - 1], node])
        t[node] = clock
        tp[node] = clock
        dd_in = rendezvous.get(node)
        if dd_in is not None and dd_in.launch in pos and pos[dd_in.launch] < idx:
            tp[node] = rp[dd_in.customer] + float(m.tau_drone[dd_in.customer, node])
            clock = max(clock, tp[node]) + par.s_retrieve
        if node in launches and node != 0:
            clock += par.s_launch
        r[node] = clock
        rp[node] = clock
        dd_out = launches.get(node)
        if dd_out is not None:
            j = dd_out.customer
            tp[j] = clock + float(m.tau_drone[node, j])
            t[j] = tp[j]
            r[j] = tp[j]
            rp[j] = tp[j]
    for dd in solution.deliveries:
        k = dd.rendezvous
        w[k] = max(0.0, tp[k] - t[k])
        wp[k] = max(0.0, t[k] - tp[k])
    return MilpAssignment(
        n=n, x=x, y=y, p=p_var, u=u, t=t, tp=tp, r=r, rp=rp, w=w, wp=wp, big_M=big_m_value(instance)
    )


def _feasible_triple(instance: Instance, i: int, j: int, k: int) -> bool:
    m = instance.matrices
    return (
        j in instance.drone_eligible
        and len({i, j, k}) == 3
        and 0 <= i <= instance.n
        and 1 <= k <= instance.n + 1
        and m.tau_drone[i, j] + m.tau_drone[j, k] <= instance.params.endurance
    )


def check_constraints(
    assignment: MilpAssignment,
    instance: Instance,
    strict_endurance_timing: bool = False,
    tol: float = 1e-6,
) -> list[str]:
    """Ids of all violated constraints, empty when the assignment is feasible."""
    a = assignment
    n = a.n
    m = instance.matrices
    par = instance.params
    M = a.big_M
    V = range(n + 2)
    N = range(1, n + 1)
    VL = range(0, n + 1)
    VR = range(1, n + 2)
    bad: list[str] = []

    def x(i, j):
        return a.x.get((i, j), 0)

    indeg = {j: sum(x(i, j) for i in VL if i != j) for j in V}
    indeg_N = {j: sum(x(i, j) for i in N if i != j) for j in V}
    outdeg = {j: sum(x(j, k) for k in VR if k != j) for j in V}
    actives = sorted(ijk for ijk, v in a.y.items() if v)
    launch_sum = {i: 0 for i in V}
    rdv_sum = {k: 0 for k in V}
    serve_sum = {j: 0 for j in V}
    launches_at: dict[int, list[tuple[int, int]]] = {}
    for (i, j, k) in actives:
        launch_sum[i] = launch_sum.get(i, 0) + 1
        rdv_sum[k] = rdv_sum.get(k, 0) + 1
        serve_sum[j] = serve_sum.get(j, 0) + 1
        launches_at.setdefault(i, []).append((j, k))

    for j in N:
        if indeg[j] + serve_sum[j] != 1:
            bad.append(f"c2[j={j}]")
    if sum(x(0, j) for j in VR) != 1:
        bad.append("c3")
    if sum(x(i, n + 1) for i in VL) != 1:
        bad.append("c4")
    for i in VL:
        for j in VR:
            if i != j and a.u[i] - a.u[j] + 1 > (n + 2) * (1 - x(i, j)) + tol:
                bad.append(f"c5[i={i},j={j}]")
    for j in N:
        if indeg[j] != outdeg[j]:
            bad.append(f"c6[j={j}]")
    for (i, j, k) in actives:
        if i in N:
            if 2 > indeg[i] + indeg_N[k]:
                bad.append(f"c7[i={i},j={j},k={k}]")
        else:
            if 1 > sum(x(h, k) for h in VL if h not in (k, j)):
                bad.append(f"c8[j={j},k={k}]")
    for i in VL:
        for k in VR:
            if k == i:
                continue
            s = sum(1 for (j2, k2) in launches_at.get(i, []) if k2 == k)
            if a.u[k] - a.u[i] < 1 - (n + 2) * (1 - s) - tol:
                bad.append(f"c9[i={i},k={k}]")
    for i in VL:
        if launch_sum.get(i, 0) > 1:
            bad.append(f"c10[i={i}]")
    for k in VR:
        if rdv_sum.get(k, 0) > 1:
            bad.append(f"c11[k={k}]")
    for i in N:
        for j in N:
            if j == i:
                continue
            gate = M * (2 - indeg[i] - indeg_N[j])
            pij = a.p.get((i, j), 0)
            if a.u[i] - a.u[j] < 1 - (n + 2) * pij - gate - tol:
                bad.append(f"c12[i={i},j={j}]")
            if a.u[i] - a.u[j] > -1 + (n + 2) * (1 - pij) + gate + tol:
                bad.append(f"c13[i={i},j={j}]")
    for j in N:
        gate = M * (1 - sum(x(k, j) for k in VL if k != j))
        p0j = a.p.get((0, j), 0)
        if a.u[0] - a.u[j] < 1 - (n + 2) * p0j - gate - tol:
            bad.append(f"c14[j={j}]")
        if a.u[0] - a.u[j] > -1 + (n + 2) * (1 - p0j) + gate + tol:
            bad.append(f"c15[j={j}]")
    for i in VL:
        for k in VR:
            if k == i:
                continue
            s_ik = [(j2, k2) for (j2, k2) in launches_at.get(i, []) if k2 == k]
            if not s_ik:
                continue
            for l in N:
                if l in (i, k):
                    continue
                s1 = sum(1 for (j2, _) in s_ik if j2 != l)
                s2 = sum(
                    1
                    for (mm, nn) in launches_at.get(l, [])
                    if mm not in (i, k, l) and nn not in (i, k)
                )
                pil = 1 if i == 0 else a.p.get((i, l), 0)
                if a.u[l] < a.u[k] - M * (3 - s1 - s2 - pil) - tol:
                    bad.append(f"c16[i={i},k={k},l={l}]")

    for i in VL:
        for k in VR:
            if i == k:
                continue
            gate = M * (1 - x(i, k))
            lhs = a.t[k] - (a.r[i] + m.tau[i, k])
            if lhs < -gate - tol:
                bad.append(f"c17[i={i},k={k}]")
            if lhs > gate + tol:
                bad.append(f"c18[i={i},k={k}]")
    for (i, j, k) in actives:
        if a.tp[j] - (a.r[i] + m.tau_drone[i, j]) < -tol:
            bad.append(f"c19[i={i},j={j}]")
        if a.tp[j] - (a.r[i] + m.tau_drone[i, j]) > tol:
            bad.append(f"c20[i={i},j={j}]")
        if a.tp[k] - (a.rp[j] + m.tau_drone[j, k]) < -tol:
            bad.append(f"c21[j={j},k={k}]")
        if a.tp[k] - (a.rp[j] + m.tau_drone[j, k]) > tol:
            bad.append(f"c22[j={j},k={k}]")
        if abs(a.tp[j] - a.rp[j]) > tol:
            bad.append(f"c23_24[j={j}]")
    for k in VR:
        if rdv_sum.get(k, 0) >= 1:
            ls = launch_sum.get(k, 0)
            if a.r[k] < a.t[k] + par.s_launch * ls + par.s_retrieve * rdv_sum[k] - tol:
                bad.append(f"c25[k={k}]")
            if a.rp[k] < a.tp[k] + par.s_launch * ls + par.s_retrieve * rdv_sum[k] - tol:
                bad.append(f"c26[k={k}]")
    for (i, j, k) in actives:
        if strict_endurance_timing:
            ls = sum(1 for (mm, nn) in launches_at.get(k, []) if mm not in (i, j, k) and nn not in (i, k))
            airborne = a.rp[k] - (a.rp[j] - m.tau_drone[i, j]) - par.s_launch * ls
        else:
            airborne = m.tau_drone[i, j] + m.tau_drone[j, k]
        if airborne > par.endurance + tol:
            bad.append(f"c27[i={i},j={j},k={k}]")
    for k in V:
        if a.w[k] < -tol or a.wp[k] < -tol:
            bad.append(f"c28[k={k}]")
    for k in VR:
        if a.w[k] < a.tp[k] - a.t[k] - tol:
            bad.append(f"c29[k={k}]")
        if a.wp[k] < a.t[k] - a.tp[k] - tol:
            bad.append(f"c30[k={k}]")
    if abs(a.w[0]) > tol or abs(a.wp[0]) > tol:
        bad.append("c31")
    for i in V:
        if abs(a.r[i] - a.rp[i]) > tol:
            bad.append(f"c32[i={i}]")
    if abs(a.t[0]) > tol:
        bad.append("c33")
    if abs(a.tp[0]) > tol:
        bad.append("c34")
    if abs(a.r[0]) > tol:
        bad.append("c35")
    if abs(a.rp[0]) > tol:
        bad.append("c36")
    for (i, j), v in a.x.items():
        if v not in (0, 1) or not (0 <= i <= n and 1 <= j <= n + 1 and i != j):
            bad.append(f"c37[i={i},j={j}]")
    for (i, j, k), v in sorted(a.y.items()):
        if v not in (0, 1) or (v == 1 and not _feasible_triple(instance, i, j, k)):
            bad.append(f"c38[i={i},j={j},k={k}]")
    for (i, j), v in a.p.items():
        if v not in (0, 1):
            bad.append(f"c39[i={i},j={j}]")
    for j in N:
        if a.p.get((0, j), 0) != 1:
            bad.append(f"c40[j={j}]")
    for i in V:
        if not (-tol <= a.u[i] <= n + 1 + tol):
            bad.append(f"c41[i={i}]")
    for cid, arr in ((42, a.t), (43, a.tp), (44, a.r), (45, a.rp)):
        for i in V:
            if arr[i] < -tol:
                bad.append(f"c{cid}[i={i}]")
    return bad


def objective_value(assignment: MilpAssignment, instance: Instance) -> float:
    """Transport cost of chosen arcs and sorties plus waiting fees."""
    m = instance.matrices
    par = instance.params
    total = 0.0
    for (i, j), v in assignment.x.items():
        if v:
            total += par.c1 * float(m.d[i, j])
    for (i, j, k), v in assignment.y.items():
        if v:
            total += par.c2 * float(m.d_drone[i, j] + m.d_drone[j, k])
    total += par.alpha * float(assignment.w.sum()) + par.beta * float(assignment.wp.sum())
    return total


# --------------------------------------------------------------------------
# LP export
# --------------------------------------------------------------------------

def lp_variable_count(instance: Instance) -> int:
    n = instance.n
    n_x = (n + 1) * (n + 1) - n
    n_y = len(enumerate_feasible_deliveries(instance))
    n_p = n * n
    return n_x + n_y + n_p + 7 * (n + 2)


def _row(terms: list[tuple[float, str]]) -> str:
    parts = []
    for coeff, name in terms:
        if coeff == 0:
            continue
        sign = "+" if coeff > 0 else "-"
        mag = abs(coeff)
        coef_s = "" if abs(mag - 1.0) < 1e-12 else f"{mag:.12g} "
        parts.append(f"{sign} {coef_s}{name}")
    if not parts:
        return "0"
    out = " ".join(parts)
    return out[2:] if out.startswith("+ ") else out


def write_lp(instance: Instance, path: str | Path | None = None, max_n: int = LP_MAX_N) -> str:
    """Emit the full model in LP format; refuses instances above ``max_n``."""
    n = instance.n
    if n > max_n:
        raise ValueError(
            f"LP export capped at n={max_n}; this instance has n={n} "
            f"({lp_variable_count(instance)} variables)"
        )
    m = instance.matrices
    par = instance.params
    M = big_m_value(instance)
    VL = list(range(0, n + 1))
    VR = list(range(1, n + 2))
    N = list(range(1, n + 1))
    V = list(range(0, n + 2))
    VD = sorted(instance.drone_eligible)
    triples = [(d.launch, d.customer, d.rendezvous) for d in sorted(enumerate_feasible_deliveries(instance))]
    by_launch: dict[int, list[tuple[int, int]]] = {}
    by_rdv: dict[int, list[tuple[int, int]]] = {}
    by_cust: dict[int, list[tuple[int, int]]] = {}
    for (i, j, k) in triples:
        by_launch.setdefault(i, []).append((j, k))
        by_rdv.setdefault(k, []).append((i, j))
        by_cust.setdefault(j, []).append((i, k))

    xn = lambda i, j: f"x_{i}_{j}"
    yn = lambda i, j, k: f"y_{i}_{j}_{k}"
    pn = lambda i, j: f"p_{i}_{j}"

    lines: list[str] = []
    add = lines.append

    def con(rid: str, terms: list[tuple[float, str]], op: str, rhs: float) -> None:
        add(f" {rid}: " + _row(terms) + f" {op} {rhs:.12g}")

    add(f"\\ truck-and-drone routing model, instance {instance.id!r}, n={n}")
    add("\\ row names carry constraint ids c2..c45; see the package docs for the id map")
    add("Minimize")
    obj: list[tuple[float, str]] = []
    for i in VL:
        for j in VR:
            if i != j:
                obj.append((par.c1 * float(m.d[i, j]), xn(i, j)))
    for (i, j, k) in triples:
        obj.append((par.c2 * float(m.d_drone[i, j] + m.d_drone[j, k]), yn(i, j, k)))
    for i in V:
        obj.append((par.alpha, f"w_{i}"))
    for i in V:
        obj.append((par.beta, f"wp_{i}"))
    add(" obj: " + _row(obj))
    add("Subject To")

    for j in N:
        terms = [(1.0, xn(i, j)) for i in VL if i != j]
        terms += [(1.0, yn(i, j, k)) for (i, k) in by_cust.get(j, [])]
        con(f"c2_{j}", terms, "=", 1)
    con("c3", [(1.0, xn(0, j)) for j in VR], "=", 1)
    con("c4", [(1.0, xn(i, n + 1)) for i in VL], "=", 1)
    for i in VL:
        for j in VR:
            if i != j:
                con(f"c5_{i}_{j}", [(1.0, f"u_{i}"), (-1.0, f"u_{j}"), (float(n + 2), xn(i, j))], "<=", n + 1)
    for j in N:
        terms = [(1.0, xn(i, j)) for i in VL if i != j]
        terms += [(-1.0, xn(j, k)) for k in VR if k != j]
        con(f"c6_{j}", terms, "=", 0)
    for (i, j, k) in triples:
        if i in N:
            terms = [(2.0, yn(i, j, k))]
            terms += [(-1.0, xn(h, i)) for h in VL if h != i]
            terms += [(-1.0, xn(l, k)) for l in N if l != k]
            con(f"c7_{i}_{j}_{k}", terms, "<=", 0)
        else:
            terms = [(1.0, yn(0, j, k))]
            terms += [(-1.0, xn(h, k)) for h in VL if h != k and h != j]
            con(f"c8_{j}_{k}", terms, "<=", 0)
    for i in VL:
        for k in VR:
            if k == i:
                continue
            terms = [(1.0, f"u_{k}"), (-1.0, f"u_{i}")]
            terms += [(-float(n + 2), yn(i, j2, k2)) for (j2, k2) in by_launch.get(i, []) if k2 == k]
            con(f"c9_{i}_{k}", terms, ">=", -(n + 1))
    for i in VL:
        if by_launch.get(i):
            con(f"c10_{i}", [(1.0, yn(i, j, k)) for (j, k) in by_launch[i]], "<=", 1)
    for k in VR:
        if by_rdv.get(k):
            con(f"c11_{k}", [(1.0, yn(i, j, k)) for (i, j) in by_rdv[k]], "<=", 1)
    for i in N:
        for j in N:
            if j == i:
                continue
            base = [(1.0, f"u_{i}"), (-1.0, f"u_{j}"), (float(n + 2), pn(i, j))]
            gate_dn = [(-M, xn(h, i)) for h in VL if h != i] + [(-M, xn(k, j)) for k in N if k != j]
            con(f"c12_{i}_{j}", base + gate_dn, ">=", 1 - 2 * M)
            gate_up = [(M, xn(h, i)) for h in VL if h != i] + [(M, xn(k, j)) for k in N if k != j]
            con(f"c13_{i}_{j}", base + gate_up, "<=", -1 + (n + 2) + 2 * M)
    for j in N:
        base = [(1.0, "u_0"), (-1.0, f"u_{j}"), (float(n + 2), pn(0, j))]
        con(f"c14_{j}", base + [(-M, xn(k, j)) for k in VL if k != j], ">=", 1 - M)
        con(f"c15_{j}", base + [(M, xn(k, j)) for k in VL if k != j], "<=", -1 + (n + 2) + M)
    for i in VL:
        for k in VR:
            if k == i:
                continue
            s_ik = [(j2, k2) for (j2, k2) in by_launch.get(i, []) if k2 == k]
            if not s_ik:
                continue
            for l in N:
                if l in (i, k):
                    continue
                s2 = [
                    (mm, nn)
                    for (mm, nn) in by_launch.get(l, [])
                    if mm not in (i, k, l) and nn not in (i, k)
                ]
                terms = [(1.0, f"u_{l}"), (-1.0, f"u_{k}")]
                terms += [(M, yn(i, j2, k)) for (j2, _) in s_ik if j2 != l]
                terms += [(M, yn(l, mm, nn)) for (mm, nn) in s2]
                rhs = -3 * M
                if i == 0:
                    rhs += M  # p_0l is fixed to one
                else:
                    terms += [(M, pn(i, l))]
                con(f"c16_{i}_{k}_{l}", terms, ">=", rhs)
    for i in VL:
        for k in VR:
            if i == k:
                continue
            con(
                f"c17_{i}_{k}",
                [(1.0, f"t_{k}"), (-1.0, f"r_{i}"), (-M, xn(i, k))],
                ">=",
                float(m.tau[i, k]) - M,
            )
            con(
                f"c18_{i}_{k}",
                [(1.0, f"t_{k}"), (-1.0, f"r_{i}"), (M, xn(i, k))],
                "<=",
                float(m.tau[i, k]) + M,
            )
    for j in VD:
        for i in VL:
            if i == j:
                continue
            ys = [(-M, yn(i, j, k2)) for (j2, k2) in by_launch.get(i, []) if j2 == j]
            base = [(1.0, f"tp_{j}"), (-1.0, f"r_{i}")]
            con(f"c19_{j}_{i}", base + ys, ">=", float(m.tau_drone[i, j]) - M)
            con(f"c20_{j}_{i}", base + [(-c, nm) for c, nm in ys], "<=", float(m.tau_drone[i, j]) + M)
        for k in VR:
            if k == j:
                continue
            ys = [(-M, yn(i2, j, k)) for (i2, j2) in by_rdv.get(k, []) if j2 == j]
            base = [(1.0, f"tp_{k}"), (-1.0, f"rp_{j}")]
            con(f"c21_{j}_{k}", base + ys, ">=", float(m.tau_drone[j, k]) - M)
            con(f"c22_{j}_{k}", base + [(-c, nm) for c, nm in ys], "<=", float(m.tau_drone[j, k]) + M)
    for j in N:
        ys = [(-M, yn(i2, j, k2)) for (i2, k2) in by_cust.get(j, [])]
        base = [(1.0, f"tp_{j}"), (-1.0, f"rp_{j}")]
        con(f"c23_{j}", base + ys, ">=", -M)
        con(f"c24_{j}", base + [(-c, nm) for c, nm in ys], "<=", M)
    for k in VR:
        for (target, arr, ai) in (("r", "t", "c25"), ("rp", "tp", "c26")):
            terms = [(1.0, f"{target}_{k}"), (-1.0, f"{arr}_{k}")]
            terms += [(-par.s_launch, yn(k, j2, k2)) for (j2, k2) in by_launch.get(k, [])]
            terms += [(-(par.s_retrieve + M), yn(i2, j2, k)) for (i2, j2) in by_rdv.get(k, [])]
            con(f"{ai}_{k}", terms, ">=", -M)
    for (i, j, k) in triples:
        excl = [
            (mm, nn)
            for (mm, nn) in by_launch.get(k, [])
            if mm not in (i, j, k) and nn not in (i, k)
        ]
        terms = [(1.0, f"rp_{k}"), (-1.0, f"rp_{j}"), (M, yn(i, j, k))]
        terms += [(-par.s_launch, yn(k, mm, nn)) for (mm, nn) in excl]
        con(f"c27_{i}_{j}_{k}", terms, "<=", par.endurance + M - float(m.tau_drone[i, j]))
    for k in V:
        con(f"c28_w_{k}", [(1.0, f"w_{k}")], ">=", 0)
        con(f"c28_wp_{k}", [(1.0, f"wp_{k}")], ">=", 0)
    for k in VR:
        con(f"c29_{k}", [(1.0, f"w_{k}"), (-1.0, f"tp_{k}"), (1.0, f"t_{k}")], ">=", 0)
        con(f"c30_{k}", [(1.0, f"wp_{k}"), (-1.0, f"t_{k}"), (1.0, f"tp_{k}")], ">=", 0)
    con("c31_w", [(1.0, "w_0")], "=", 0)
    con("c31_wp", [(1.0, "wp_0")], "=", 0)
    for i in V:
        con(f"c32_{i}", [(1.0, f"r_{i}"), (-1.0, f"rp_{i}")], "=", 0)
    con("c33", [(1.0, "t_0")], "=", 0)
    con("c34", [(1.0, "tp_0")], "=", 0)
    con("c35", [(1.0, "r_0")], "=", 0)
    con("c36", [(1.0, "rp_0")], "=", 0)
    for j in N:
        con(f"c40_{j}", [(1.0, pn(0, j))], "=", 1)

    add("Bounds")
    for i in V:
        add(f" 0 <= u_{i} <= {n + 1}")
    for fam in ("t", "tp", "r", "rp", "w", "wp"):
        for i in V:
            add(f" {fam}_{i} >= 0")
    add("Binaries")
    names = [xn(i, j) for i in VL for j in VR if i != j]
    names += [yn(i, j, k) for (i, j, k) in triples]
    names += [pn(i, j) for i in N for j in N if i != j]
    names += [pn(0, j) for j in N]
    for chunk_start in range(0, len(names), 8):
        add(" " + " ".join(names[chunk_start : chunk_start + 8]))
    add("End")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
