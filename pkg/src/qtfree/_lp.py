"""Exact simplex for potential LPs.

    maximize    sum_v c[v] * f[v]
    subject to  f[u] - f[v] <= w   and   f[v] - f[u] <= w   for each (u, v, w)
                f[root] = 0

with integer objective and integer weights ``w`` that satisfy the triangle
inequality along the constraint graph.  Shifting by f0 = -dist(root, .) makes
the origin feasible with a nonnegative right-hand side, so no phase one is
needed.  The constraint matrix is a network matrix, hence totally unimodular:
every tableau entry stays in {-1, 0, 1}, every pivot is exactly 1, and the
whole computation is integer arithmetic.
"""
from __future__ import annotations

import heapq

import numpy as np

from .errors import SolverFailure

_INT64_SAFE = 1 << 62


def _root_distances(k, arcs, root):
    adj = [[] for _ in range(k)]
    for u, v, w in arcs:
        adj[u].append((v, w))
        adj[v].append((u, w))
    dist = [None] * k
    dist[root] = 0
    heap = [(0, root)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adj[u]:
            if dist[v] is None or d + w < dist[v]:
                dist[v] = d + w
                heapq.heappush(heap, (d + w, v))
    if any(d is None for d in dist):
        raise SolverFailure("constraint graph is disconnected")
    return dist


def max_potential(k: int, arcs, root: int, c) -> tuple[int, list[int]]:
    """Solve the LP over vertices ``0..k-1``; returns (optimum, optimal f).

    ``c`` is a length-k integer list (c[root] is ignored).
    """
    dist = _root_distances(k, arcs, root)
    var_of = {}
    for v in range(k):
        if v != root:
            var_of[v] = len(var_of)
    nv = len(var_of)
    rows = []
    for u, v, w in arcs:
        # f[u] - f[v] <= w  becomes  g[u] - g[v] <= w + dist[u] - dist[v]
        for a, b in ((u, v), (v, u)):
            rhs = w + dist[a] - dist[b]
            if rhs < 0:
                raise SolverFailure("weights violate the triangle inequality")
            rows.append((var_of.get(a), var_of.get(b), rhs))
    m = len(rows)
    cost = [0] * nv
    for v, j in var_of.items():
        cost[j] = int(c[v])
    bound = (sum(abs(x) for x in cost) + 1) * (2 * max(dist) + 2) * 4
    dtype = np.int64 if bound < _INT64_SAFE else object

    # tableau columns: nv structural, m slacks, rhs
    T = np.zeros((m, nv + m + 1), dtype=dtype)
    for i, (a, b, rhs) in enumerate(rows):
        if a is not None:
            T[i, a] += 1
        if b is not None:
            T[i, b] -= 1
        T[i, nv + i] = 1
        T[i, -1] = rhs
    # z[j] = reduced profit of column j (entering candidates have z > 0)
    z = np.zeros(nv + m + 1, dtype=dtype)
    z[:nv] = cost
    basis = list(range(nv, nv + m))
    degenerate_run = 0
    for _ in range(100000):
        if degenerate_run < 50:
            j = int(np.argmax(z[:-1]))
            if z[j] <= 0:
                break
        else:  # Bland's rule once pivots stall
            pos = np.flatnonzero(z[:-1] > 0)
            if pos.size == 0:
                break
            j = int(pos[0])
        col = T[:, j]
        cand = np.flatnonzero(col > 0)
        if cand.size == 0:
            raise SolverFailure("LP is unbounded")
        ratios = T[cand, -1]
        best = ratios.min()
        ties = cand[ratios == best]
        r = min(ties, key=lambda i: basis[i])
        if T[r, j] != 1:
            raise SolverFailure(f"non-unit pivot {T[r, j]}; matrix not totally unimodular")
        degenerate_run = degenerate_run + 1 if best == 0 else 0
        prow = T[r].copy()
        nz = np.flatnonzero(col)
        for i in nz:
            if i != r:
                T[i] -= col[i] * prow
        z -= z[j] * prow
        basis[r] = j
    else:  # pragma: no cover
        raise SolverFailure("simplex iteration limit reached")

    g = [0] * nv
    for i, j in enumerate(basis):
        if j < nv:
            g[j] = int(T[i, -1])
    f = [0] * k
    for v, j in var_of.items():
        f[v] = g[j] - dist[v]
    value = sum(int(c[v]) * f[v] for v in range(k) if v != root)
    if value != -int(z[-1]) - sum(int(c[v]) * dist[v] for v in var_of):
        raise SolverFailure("objective bookkeeping mismatch")
    for u, v, w in arcs:
        if abs(f[u] - f[v]) > w:
            raise SolverFailure(f"returned potential violates constraint ({u},{v})")
    return value, f
