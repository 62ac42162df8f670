# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer kernels; see _pykernels for the reference versions."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def bfs_all_pairs(Py_ssize_t n, indptr, indices):
    cdef const cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    dist_arr = np.full((n, n), -1, dtype=np.int32)
    cdef cnp.int32_t[:, ::1] dist = dist_arr
    cdef cnp.int64_t[::1] queue = np.empty(max(n, 1), dtype=np.int64)
    cdef Py_ssize_t src, head, tail, u, v, k
    cdef cnp.int32_t du
    for src in range(n):
        dist[src, src] = 0
        queue[0] = src
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[src, u] + 1
            for k in range(ip[u], ip[u + 1]):
                v = ix[k]
                if dist[src, v] < 0:
                    dist[src, v] = du
                    queue[tail] = v
                    tail += 1
    return dist_arr


cdef Py_ssize_t _find(cnp.int64_t[::1] parent, Py_ssize_t v):
    cdef Py_ssize_t root = v, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[v] != root:
        nxt = parent[v]
        parent[v] = root
        v = nxt
    return root


def gromov_radius_matrix(depth, indptr, indices):
    cdef const cnp.int64_t[::1] dep = np.ascontiguousarray(depth, dtype=np.int64)
    cdef const cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t n = dep.shape[0]
    R_arr = np.zeros((n, n), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] R = R_arr
    cdef cnp.int64_t[::1] parent = np.arange(n, dtype=np.int64)
    # members of each root form a singly linked list: head/next/tail/size
    cdef cnp.int64_t[::1] head = np.arange(n, dtype=np.int64)
    cdef cnp.int64_t[::1] tail = np.arange(n, dtype=np.int64)
    cdef cnp.int64_t[::1] nxt = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] size = np.ones(n, dtype=np.int64)
    cdef cnp.uint8_t[::1] alive = np.zeros(n, dtype=np.uint8)
    cdef cnp.int64_t[::1] order = np.lexsort((np.arange(n), -np.asarray(dep))).astype(np.int64)
    cdef Py_ssize_t i = 0, j, t, v, w, k, a, b, p, q
    cdef cnp.int32_t level
    while i < n:
        level = <cnp.int32_t>dep[order[i]]
        j = i
        while j < n and dep[order[j]] == level:
            v = order[j]
            alive[v] = 1
            R[v, v] = level
            j += 1
        for t in range(i, j):
            v = order[t]
            for k in range(ip[v], ip[v + 1]):
                w = ix[k]
                if not alive[w]:
                    continue
                a = _find(parent, v)
                b = _find(parent, w)
                if a == b:
                    continue
                if size[a] < size[b]:
                    a, b = b, a
                p = head[a]
                while p >= 0:
                    q = head[b]
                    while q >= 0:
                        R[p, q] = level
                        R[q, p] = level
                        q = nxt[q]
                    p = nxt[p]
                parent[b] = a
                nxt[tail[a]] = head[b]
                tail[a] = tail[b]
                size[a] += size[b]
        i = j
    return R_arr


def four_point_defect(D):
    cdef const cnp.int64_t[:, ::1] M = np.ascontiguousarray(D, dtype=np.int64)
    cdef Py_ssize_t n = M.shape[0]
    if n == 0:
        return 0
    cdef Py_ssize_t x, y, z, w
    cdef cnp.int64_t best = 0  # any (x, x, x, x) contributes exactly 0
    cdef cnp.int64_t s1, s2, s3, val
    for x in range(n):
        for y in range(n):
            for z in range(n):
                for w in range(n):
                    s1 = M[x, y] + M[z, w]
                    s2 = M[x, z] + M[y, w]
                    s3 = M[x, w] + M[y, z]
                    val = s1 - (s2 if s2 > s3 else s3)
                    if val > best:
                        best = val
    return int(best)
