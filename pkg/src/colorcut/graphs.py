"""Shared undirected-graph primitives.

Canonical simple graphs, union-find, connectivity helpers, and the random
graph generators used by the verification suites.
"""

from __future__ import annotations

import random
from dataclasses import dataclass


class UnionFind:
    """Array-backed disjoint sets with path compression."""

    __slots__ = ("parent", "components")

    def __init__(self, size: int) -> None:
        self.parent = list(range(size))
        self.components = size

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if rx > ry:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.components -= 1
        return True


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..vertex_count-1.

    Edges are stored canonically: u < v, sorted lexicographically, no
    duplicates. Build through Graph.make to get normalization for free.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    @staticmethod
    def make(vertex_count: int, edges) -> "Graph":
        if vertex_count < 0:
            raise ValueError("negative vertex count")
        seen = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ValueError(f"edge ({u}, {v}) out of range for {vertex_count} vertices")
            seen.add((u, v) if u < v else (v, u))
        return Graph(vertex_count, tuple(sorted(seen)))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def degrees(self) -> list[int]:
        deg = [0] * self.vertex_count
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def is_connected(self) -> bool:
        return is_connected(self.vertex_count, self.edges)


def is_connected(vertex_count: int, edges) -> bool:
    """True iff the graph has a single component covering every vertex.

    Graphs with at most one vertex count as connected.
    """
    if vertex_count <= 1:
        return True
    uf = UnionFind(vertex_count)
    remaining = vertex_count - 1
    for u, v in edges:
        if uf.union(u, v):
            remaining -= 1
            if remaining == 0:
                return True
    return False


def component_count(vertex_count: int, edges) -> int:
    uf = UnionFind(vertex_count)
    for u, v in edges:
        uf.union(u, v)
    return uf.components


def connected_in_subset(graph: Graph, subset) -> bool:
    """True iff `subset` induces a connected subgraph of `graph`."""
    sub = set(subset)
    if not sub:
        return False
    if len(sub) == 1:
        return True
    adj = graph.adjacency()
    start = next(iter(sub))
    seen = {start}
    stack = [start]
    while stack:
        w = stack.pop()
        for x in adj[w]:
            if x in sub and x not in seen:
                seen.add(x)
                stack.append(x)
    return seen == sub


def random_simple_graph(n: int, m: int, rng: random.Random) -> Graph:
    """Uniformly draw m distinct edges on n vertices (rejection sampling)."""
    if m > n * (n - 1) // 2:
        raise ValueError("too many edges for a simple graph")
    chosen: set[tuple[int, int]] = set()
    while len(chosen) < m:
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v:
            continue
        chosen.add((u, v) if u < v else (v, u))
    return Graph.make(n, chosen)


def random_max_degree3_graph(n: int, m: int, rng: random.Random) -> Graph:
    """Random simple graph with max degree 3 and exactly m edges.

    m must fit the degree budget (m <= 3n/2). Rare dead ends, where all
    remaining capacity sits on one vertex, trigger a restart.
    """
    if m > (3 * n) // 2:
        raise ValueError("m exceeds the degree-3 budget")
    while True:
        deg = [0] * n
        chosen: set[tuple[int, int]] = set()
        attempts = 0
        stuck = False
        while len(chosen) < m:
            attempts += 1
            if attempts > 200 * (m + 5):
                stuck = True
                break
            u = rng.randrange(n)
            v = rng.randrange(n)
            if u == v or deg[u] >= 3 or deg[v] >= 3:
                continue
            e = (u, v) if u < v else (v, u)
            if e in chosen:
                continue
            chosen.add(e)
            deg[u] += 1
            deg[v] += 1
        if not stuck:
            return Graph.make(n, chosen)
