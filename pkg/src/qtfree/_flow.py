"""Uncapacitated min-cost transshipment by successive shortest paths.

Flow on each undirected edge is stored as a signed net value.  Sending from u
to v first cancels any v->u flow at cost -w (capacity = that flow), otherwise
it pays +w with unlimited capacity.  Supplies are integers; callers scale
rational inputs by a common denominator.
"""
from __future__ import annotations

import heapq

from .errors import SolverFailure


def min_cost_transshipment(k: int, arcs, supply) -> tuple[int, dict]:
    """Return (total cost, {(u, v): net flow u->v}) for a balanced supply vector."""
    if sum(supply) != 0:
        raise SolverFailure("supply is not balanced")
    adj = [[] for _ in range(k)]
    for idx, (u, v, w) in enumerate(arcs):
        adj[u].append((v, w, idx, 1))
        adj[v].append((u, w, idx, -1))
    flow = [0] * len(arcs)  # signed, positive means arcs[idx][0] -> arcs[idx][1]
    excess = list(supply)
    pot = [0] * k

    def arc_cost(w, idx, sign):
        # sending along direction `sign` on arc idx
        if flow[idx] * sign < 0:
            return -w, abs(flow[idx])
        return w, None

    for _ in range(10 * k * k + 1000):
        sources = [v for v in range(k) if excess[v] > 0]
        if not sources:
            break
        s = sources[0]
        dist = [None] * k
        prev = [None] * k
        dist[s] = 0
        heap = [(0, s)]
        done = [False] * k
        while heap:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for v, w, idx, sign in adj[u]:
                cst, _ = arc_cost(w, idx, sign)
                nd = d + cst + pot[u] - pot[v]
                if nd < d:
                    raise SolverFailure("negative reduced cost; potentials broken")
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    prev[v] = (u, idx, sign)
                    heapq.heappush(heap, (nd, v))
        sinks = [v for v in range(k) if excess[v] < 0]
        t = min(sinks, key=lambda v: (dist[v], v))
        # bottleneck along the path
        amount = min(excess[s], -excess[t])
        path = []
        v = t
        while v != s:
            u, idx, sign = prev[v]
            path.append((idx, sign))
            _, cap = arc_cost(arcs[idx][2], idx, sign)
            if cap is not None:
                amount = min(amount, cap)
            v = u
        for idx, sign in path:
            flow[idx] += sign * amount
        excess[s] -= amount
        excess[t] += amount
        dt = dist[t]
        for v in range(k):
            pot[v] += min(dist[v], dt)
    else:  # pragma: no cover
        raise SolverFailure("augmentation limit reached")
    cost = sum(abs(f) * arcs[i][2] for i, f in enumerate(flow))
    return cost, {(arcs[i][0], arcs[i][1]): f for i, f in enumerate(flow) if f}
