"""Pure-Python/numpy versions of the integer kernels.

Selected by :mod:`qtfree.kernels` when the compiled extension is missing or
``QTF_PURE=1`` is set.  Signatures and results match ``_ckernels`` exactly.
"""
from collections import deque

import numpy as np


def bfs_all_pairs(n, indptr, indices):
    """Edge-path distance matrix; unreachable pairs are -1."""
    dist = np.full((n, n), -1, dtype=np.int32)
    for src in range(n):
        row = dist[src]
        row[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            du = row[u] + 1
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if row[v] < 0:
                    row[v] = du
                    queue.append(v)
    return dist


def gromov_radius_matrix(depth, indptr, indices):
    """All-pairs R_o from the distance-to-basepoint vector ``depth``.

    Vertices are switched on in decreasing depth.  When switching on level r
    merges two components, every cross pair gets R_o = r; a vertex paired with
    itself gets its own depth.
    """
    n = len(depth)
    R = np.zeros((n, n), dtype=np.int32)
    parent = list(range(n))
    members = [[v] for v in range(n)]
    alive = np.zeros(n, dtype=bool)

    def find(v):
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    order = sorted(range(n), key=lambda v: (-int(depth[v]), v))
    i = 0
    while i < n:
        level = int(depth[order[i]])
        j = i
        while j < n and int(depth[order[j]]) == level:
            v = order[j]
            alive[v] = True
            R[v, v] = level
            j += 1
        for v in order[i:j]:
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if not alive[w]:
                    continue
                a, b = find(v), find(w)
                if a == b:
                    continue
                if len(members[a]) < len(members[b]):
                    a, b = b, a
                ma, mb = members[a], members[b]
                R[np.ix_(ma, mb)] = level
                R[np.ix_(mb, ma)] = level
                parent[b] = a
                ma.extend(mb)
                members[b] = []
        i = j
    return R


def four_point_defect(D):
    """max over quadruples of D[x,y]+D[z,w] - max(D[x,z]+D[y,w], D[x,w]+D[y,z])."""
    D = np.asarray(D, dtype=np.int64)
    n = D.shape[0]
    if n == 0:
        return 0
    best = None
    for x in range(n):
        # s1[y,z,w] = D[x,y] + D[z,w]
        s1 = D[x][:, None, None] + D[None, :, :]
        s2 = D[x][None, :, None] + D[:, None, :]  # D[x,z] + D[y,w]
        s3 = D[x][None, None, :] + D[:, :, None]  # D[x,w] + D[y,z]
        m = int((s1 - np.maximum(s2, s3)).max())
        if best is None or m > best:
            best = m
    return best
