"""Minimum-congestion concurrent flow on a host graph.

One unit of flow is routed between every ordered vertex pair; the diagonal
pair (w, w) stays put on its length-0 path. Vertex congestion counts every
path through a vertex, endpoints and length-0 paths included. The optimum
is computed by an arc-based linear program over unordered pairs (mirroring
an optimal solution never increases the maximum, so the symmetric
restriction is lossless), then turned back into weighted path collections
by cycle removal and greedy decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .graphs import Graph

DEFAULT_LP_TOLERANCE = 1e-6
_EPS = 1e-12


class Infeasible(Exception):
    """No concurrent flow exists (the host graph is disconnected)."""


@dataclass
class ConcurrentFlow:
    """Weighted path collections per ordered vertex pair.

    paths[(u, v)] lists (path, weight) with the path running from u to v;
    weights per pair are normalized to sum to exactly 1. congestion is the
    exact maximum vertex load recomputed from the stored paths, while
    lp_congestion is the LP objective value they were derived from.
    """

    graph: Graph
    paths: dict[tuple[int, int], tuple[tuple[tuple[int, ...], float], ...]]
    congestion: float
    lp_congestion: float

    def pair_paths(self, u: int, v: int):
        return self.paths[(u, v)]

    def pair_value(self, u: int, v: int) -> float:
        return sum(w for _, w in self.paths[(u, v)])

    def sample(self, u: int, v: int, rng) -> tuple[int, ...]:
        """Draw one u-v path with probability proportional to its weight."""
        entries = self.paths[(u, v)]
        if len(entries) == 1:
            return entries[0][0]
        r = rng.random()
        acc = 0.0
        for path, w in entries:
            acc += w
            if r < acc:
                return path
        return entries[-1][0]

    def vertex_loads(self) -> list[float]:
        loads = [0.0] * self.graph.vertex_count
        for plist in self.paths.values():
            for path, w in plist:
                for vtx in set(path):
                    loads[vtx] += w
        return loads


def _find_cycle(flow: np.ndarray, arcs, vertex_count: int):
    """Arc indices of one directed cycle with positive flow, or None."""
    out_arcs: list[list[int]] = [[] for _ in range(vertex_count)]
    for idx, (u, _) in enumerate(arcs):
        if flow[idx] > _EPS:
            out_arcs[u].append(idx)
    state = [0] * vertex_count  # 0 new, 1 on stack, 2 done
    via: dict[int, int] = {}  # vertex -> arc used to reach it on the stack
    for start in range(vertex_count):
        if state[start] != 0:
            continue
        stack = [(start, 0)]
        state[start] = 1
        while stack:
            node, ptr = stack[-1]
            if ptr < len(out_arcs[node]):
                stack[-1] = (node, ptr + 1)
                arc_idx = out_arcs[node][ptr]
                nxt = arcs[arc_idx][1]
                if state[nxt] == 1:
                    cycle = [arc_idx]
                    cur = node
                    while cur != nxt:
                        cycle.append(via[cur])
                        cur = arcs[via[cur]][0]
                    return cycle
                if state[nxt] == 0:
                    state[nxt] = 1
                    via[nxt] = arc_idx
                    stack.append((nxt, 0))
            else:
                state[node] = 2
                stack.pop()
    return None


def _remove_cycles(flow: np.ndarray, arcs, vertex_count: int) -> None:
    """Cancel directed cycles in one commodity's arc flow, in place."""
    while True:
        cycle = _find_cycle(flow, arcs, vertex_count)
        if cycle is None:
            return
        drop = min(flow[idx] for idx in cycle)
        for idx in cycle:
            flow[idx] -= drop


def _decompose(flow: np.ndarray, arcs, s: int, t: int, vertex_count: int):
    """Greedy path decomposition of an acyclic s-t flow; always follows the
    smallest-index positive arc, so the output is deterministic."""
    out_arcs: list[list[int]] = [[] for _ in range(vertex_count)]
    for idx, (u, _) in enumerate(arcs):
        out_arcs[u].append(idx)
    paths = []
    for _ in range(len(arcs) + 1):
        node = s
        path_vertices = [s]
        path_arcs = []
        while node != t:
            nxt_arc = None
            for idx in out_arcs[node]:
                if flow[idx] > _EPS:
                    nxt_arc = idx
                    break
            if nxt_arc is None:
                break
            path_arcs.append(nxt_arc)
            node = arcs[nxt_arc][1]
            path_vertices.append(node)
            if len(path_vertices) > vertex_count:
                raise RuntimeError("walk exceeded vertex count; residual flow is not acyclic")
        if node != t or not path_arcs:
            break
        weight = min(flow[idx] for idx in path_arcs)
        for idx in path_arcs:
            flow[idx] -= weight
        paths.append((tuple(path_vertices), float(weight)))
    return paths


def min_congestion_flow(graph: Graph, lp_tolerance: float = DEFAULT_LP_TOLERANCE) -> ConcurrentFlow:
    """Solve the concurrent-flow LP and decompose the optimum into paths.

    Raises Infeasible on disconnected hosts. The returned per-pair weights
    sum to exactly 1, and the recomputed congestion stays within the LP
    tolerance of the LP objective.
    """
    ell = graph.vertex_count
    if ell < 1:
        raise ValueError("empty host graph")
    if not graph.is_connected():
        raise Infeasible("host graph is disconnected")
    if ell == 1:
        paths = {(0, 0): (((0,), 1.0),)}
        return ConcurrentFlow(graph, paths, 1.0, 1.0)

    arcs: list[tuple[int, int]] = []
    for u, v in graph.edges:
        arcs.append((u, v))
        arcs.append((v, u))
    n_arcs = len(arcs)
    in_arcs: list[list[int]] = [[] for _ in range(ell)]
    out_arcs: list[list[int]] = [[] for _ in range(ell)]
    for idx, (u, v) in enumerate(arcs):
        out_arcs[u].append(idx)
        in_arcs[v].append(idx)
    pairs = [(s, t) for s in range(ell) for t in range(s + 1, ell)]
    n_pairs = len(pairs)
    n_vars = n_pairs * n_arcs + 1
    gamma_col = n_vars - 1

    eq_rows: list[int] = []
    eq_cols: list[int] = []
    eq_vals: list[float] = []
    b_eq: list[float] = []
    row = 0
    for ci, (s, t) in enumerate(pairs):
        base = ci * n_arcs
        for w in range(ell):
            if w == t:
                continue  # redundant by conservation
            for idx in out_arcs[w]:
                eq_rows.append(row)
                eq_cols.append(base + idx)
                eq_vals.append(1.0)
            for idx in in_arcs[w]:
                eq_rows.append(row)
                eq_cols.append(base + idx)
                eq_vals.append(-1.0)
            b_eq.append(1.0 if w == s else 0.0)
            row += 1
    a_eq = sparse.coo_matrix((eq_vals, (eq_rows, eq_cols)), shape=(row, n_vars))

    ub_rows: list[int] = []
    ub_cols: list[int] = []
    ub_vals: list[float] = []
    b_ub: list[float] = []
    for w in range(ell):
        # endpoints contribute a load of 2*(ell-1) + 1 at w no matter what;
        # transit flow is doubled because each unordered pair stands for two
        # mirrored ordered pairs.
        for ci, (s, t) in enumerate(pairs):
            if w == s or w == t:
                continue
            base = ci * n_arcs
            for idx in in_arcs[w]:
                ub_rows.append(w)
                ub_cols.append(base + idx)
                ub_vals.append(2.0)
        ub_rows.append(w)
        ub_cols.append(gamma_col)
        ub_vals.append(-1.0)
        b_ub.append(-(2.0 * (ell - 1) + 1.0))
    a_ub = sparse.coo_matrix((ub_vals, (ub_rows, ub_cols)), shape=(ell, n_vars))

    objective = np.zeros(n_vars)
    objective[gamma_col] = 1.0
    result = linprog(
        objective,
        A_ub=a_ub.tocsr(),
        b_ub=np.array(b_ub),
        A_eq=a_eq.tocsr(),
        b_eq=np.array(b_eq),
        bounds=(0, None),
        method="highs",
    )
    if not result.success:
        raise Infeasible(f"LP solver failed: {result.message}")
    x = np.maximum(result.x, 0.0)
    lp_gamma = float(x[gamma_col])

    paths: dict[tuple[int, int], tuple[tuple[tuple[int, ...], float], ...]] = {}
    for w in range(ell):
        paths[(w, w)] = (((w,), 1.0),)
    for ci, (s, t) in enumerate(pairs):
        flow = x[ci * n_arcs : (ci + 1) * n_arcs].copy()
        _remove_cycles(flow, arcs, ell)
        plist = _decompose(flow, arcs, s, t, ell)
        total = sum(w for _, w in plist)
        if abs(total - 1.0) > 1e-6 + lp_tolerance:
            raise Infeasible(f"pair ({s}, {t}) decomposed to value {total}, expected 1")
        plist = [(p, w / total) for p, w in plist]
        paths[(s, t)] = tuple(plist)
        paths[(t, s)] = tuple((tuple(reversed(p)), w) for p, w in plist)

    flow_obj = ConcurrentFlow(graph, paths, 0.0, lp_gamma)
    flow_obj.congestion = max(flow_obj.vertex_loads())
    return flow_obj


__all__ = ["ConcurrentFlow", "Infeasible", "min_congestion_flow", "DEFAULT_LP_TOLERANCE"]
