"""Finite connected graphs with a basepoint and their edge-path metric.

Vertices are ``0..n-1``.  A :class:`PointedGraph` carries the full distance
matrix (int32, read-only), computed once by BFS from every vertex.

Connectivity "outside the open ball B(o, r)" is computed on the subgraph
induced by the vertices at distance >= r.  This agrees with connectivity in
the 1-skeleton minus the ball: an edge interior touches only its two
endpoints, so a path through the 1-skeleton that avoids the ball traverses
whole edges whose endpoints both survive.  :func:`subdivide` exists so tests
can check this against a finer graph.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import kernels
from .errors import DisconnectedGraph, InvalidBasepoint, InvalidEdge, InvalidInput


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def from_edges(cls, vertex_count, edge_list):
        if not isinstance(vertex_count, int) or vertex_count < 1:
            raise InvalidInput(f"vertex_count must be a positive integer, got {vertex_count!r}")
        seen = set()
        for e in edge_list:
            if len(e) != 2:
                raise InvalidEdge(e, "an edge has exactly two endpoints")
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise InvalidEdge(e, "endpoint out of range")
            if u == v:
                raise InvalidEdge(e, "loop")
            seen.add((min(u, v), max(u, v)))
        return cls(vertex_count, tuple(sorted(seen)))

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) adjacency with sorted neighbour lists."""
        n = self.vertex_count
        deg = np.zeros(n + 1, dtype=np.int64)
        for u, v in self.edges:
            deg[u + 1] += 1
            deg[v + 1] += 1
        indptr = np.cumsum(deg)
        adj = [[] for _ in range(n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        indices = np.array([w for nb in adj for w in sorted(nb)], dtype=np.int64)
        return indptr, indices

    def neighbors(self, v: int) -> np.ndarray:
        indptr, indices = self.csr
        return indices[indptr[v]:indptr[v + 1]]

    def degree(self, v: int) -> int:
        indptr, _ = self.csr
        return int(indptr[v + 1] - indptr[v])


@dataclass(frozen=True)
class PointedGraph:
    graph: Graph
    basepoint: int
    dist: np.ndarray = field(repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.graph.vertex_count

    @property
    def edges(self):
        return self.graph.edges

    @cached_property
    def depth(self) -> np.ndarray:
        """Distance from the basepoint to every vertex."""
        return self.dist[self.basepoint]

    def d(self, u: int, v: int) -> int:
        return int(self.dist[u, v])

    def rebased(self, basepoint: int) -> "PointedGraph":
        if not 0 <= basepoint < self.n:
            raise InvalidBasepoint(basepoint, self.n)
        return PointedGraph(self.graph, basepoint, self.dist)

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges], "basepoint": self.basepoint}


def build_pointed_graph(vertex_count, edge_list, basepoint=0) -> PointedGraph:
    """Validate the input and compute all-pairs edge-path distances.

    Raises InvalidEdge, InvalidBasepoint or DisconnectedGraph (carrying the
    first unreachable vertex).
    """
    graph = Graph.from_edges(vertex_count, edge_list)
    if not isinstance(basepoint, (int, np.integer)) or not 0 <= basepoint < vertex_count:
        raise InvalidBasepoint(basepoint, vertex_count)
    indptr, indices = graph.csr
    dist = kernels.bfs_all_pairs(vertex_count, indptr, indices)
    unreachable = np.flatnonzero(dist[0] < 0)
    if unreachable.size:
        raise DisconnectedGraph(int(unreachable[0]))
    dist.setflags(write=False)
    return PointedGraph(graph, int(basepoint), dist)


def parse_graph(data) -> PointedGraph:
    """Build from the JSON object ``{"n": int, "edges": [[u, v], ...], "basepoint": int}``."""
    if not isinstance(data, dict):
        raise InvalidInput("graph JSON must be an object")
    try:
        n = data["n"]
        edges = data["edges"]
    except KeyError as exc:
        raise InvalidInput(f"graph JSON missing key {exc.args[0]!r}") from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise InvalidInput("'n' must be an integer")
    if not isinstance(edges, list) or not all(isinstance(e, list) and all(isinstance(x, int) for x in e) for e in edges):
        raise InvalidInput("'edges' must be a list of [u, v] integer pairs")
    basepoint = data.get("basepoint", 0)
    if not isinstance(basepoint, int) or isinstance(basepoint, bool):
        raise InvalidInput("'basepoint' must be an integer")
    return build_pointed_graph(n, edges, basepoint)


def load_graph(path) -> PointedGraph:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: malformed JSON ({exc})") from None
    return parse_graph(data)


def open_ball(pg: PointedGraph, radius: int) -> set[int]:
    """{v : d(o, v) < radius}."""
    return {int(v) for v in np.flatnonzero(pg.depth < radius)}


def components_outside_ball(pg: PointedGraph, radius: int) -> list[list[int]]:
    """Connected components of the subgraph induced on {v : d(o, v) >= radius}.

    Blocks are sorted lists, ordered by smallest member.
    """
    keep = pg.depth >= radius
    parent = list(range(pg.n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, v in pg.edges:
        if keep[u] and keep[v]:
            a, b = find(u), find(v)
            if a != b:
                parent[max(a, b)] = min(a, b)
    blocks: dict[int, list[int]] = {}
    for v in np.flatnonzero(keep):
        blocks.setdefault(find(int(v)), []).append(int(v))
    return sorted(blocks.values())


def subdivide(pg: PointedGraph, k: int) -> PointedGraph:
    """Replace every edge by a path with ``k`` new interior vertices.

    Original vertices keep their indices; distances scale by ``k + 1``.
    """
    n = pg.n
    edges = []
    nxt = n
    for u, v in pg.edges:
        chain = [u] + list(range(nxt, nxt + k)) + [v]
        nxt += k
        edges.extend(zip(chain, chain[1:]))
    return build_pointed_graph(nxt, edges, pg.basepoint)


# Small named families used by the tests, the CLI corpus and the acceptance suite.


def path_graph(n: int, basepoint: int = 0) -> PointedGraph:
    return build_pointed_graph(n, [(i, i + 1) for i in range(n - 1)], basepoint)


def cycle_graph(n: int, basepoint: int = 0) -> PointedGraph:
    return build_pointed_graph(n, [(i, (i + 1) % n) for i in range(n)], basepoint)


def star_graph(leaves: int) -> PointedGraph:
    """Centre 0 (the basepoint) joined to leaves 1..leaves."""
    return build_pointed_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)], 0)


def grid_graph(rows: int, cols: int, basepoint: int = 0) -> PointedGraph:
    idx = lambda r, c: r * cols + c  # noqa: E731
    edges = [(idx(r, c), idx(r, c + 1)) for r in range(rows) for c in range(cols - 1)]
    edges += [(idx(r, c), idx(r + 1, c)) for r in range(rows - 1) for c in range(cols)]
    return build_pointed_graph(rows * cols, edges, basepoint)


def is_tree(pg: PointedGraph) -> bool:
    return len(pg.edges) == pg.n - 1
