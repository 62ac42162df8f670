"""Kerr's quotient of a pointed graph and its finite R-tree realization.

For vertices x1, x2 let R_o(x1, x2) be the largest r such that x1 and x2 are
joined outside the open ball B(o, r), and

    d'(x1, x2) = d(x1, o) + d(x2, o) - 2 R_o(x1, x2).

Identifying vertices at d'-distance zero gives the metric space
:class:`QuotientMetric`.  Everything is computed on the vertex set; see
:mod:`qtfree.graph_metric` for why induced-subgraph connectivity is enough.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import InvalidInput, NotTreeMetric, PseudoMetricViolation, QTFError, UpperBoundViolation
from .graph_metric import PointedGraph


@lru_cache(maxsize=64)
def ro_matrix(pg: PointedGraph) -> np.ndarray:
    """All-pairs R_o as an int32 matrix (read-only)."""
    indptr, indices = pg.graph.csr
    R = kernels.gromov_radius_matrix(pg.depth, indptr, indices)
    R.setflags(write=False)
    return R


def r_o(pg: PointedGraph, x1: int, x2: int) -> int:
    return int(ro_matrix(pg)[x1, x2])


@lru_cache(maxsize=64)
def d_prime_matrix(pg: PointedGraph) -> np.ndarray:
    depth = pg.depth.astype(np.int64)
    Dp = depth[:, None] + depth[None, :] - 2 * ro_matrix(pg).astype(np.int64)
    Dp.setflags(write=False)
    return Dp


def d_prime(pg: PointedGraph, x1: int, x2: int) -> int:
    return int(d_prime_matrix(pg)[x1, x2])


@dataclass(frozen=True)
class QuotientMetric:
    classes: tuple[tuple[int, ...], ...]
    class_of: tuple[int, ...]
    dist_Y: np.ndarray = field(repr=False, compare=False)
    base_class: int = 0

    @property
    def size(self) -> int:
        return len(self.classes)

    @classmethod
    def from_metric(cls, dist, base: int = 0) -> "QuotientMetric":
        """Wrap a plain integer metric matrix; class i is the point i."""
        D = np.array(dist, dtype=np.int64)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise InvalidInput("metric must be a square matrix")
        k = D.shape[0]
        D.setflags(write=False)
        return cls(tuple((i,) for i in range(k)), tuple(range(k)), D, base)

    def to_json(self) -> dict:
        return {
            "classes": [list(c) for c in self.classes],
            "base_class": self.base_class,
            "dist_Y": self.dist_Y.tolist(),
        }


def _check_pseudometric(Dp: np.ndarray) -> None:
    if (Dp < 0).any():
        i, j = np.argwhere(Dp < 0)[0]
        raise PseudoMetricViolation(f"d'({i},{j}) = {Dp[i, j]} < 0")
    if not (Dp == Dp.T).all():
        raise PseudoMetricViolation("d' is not symmetric")
    for k in range(Dp.shape[0]):
        viol = Dp > Dp[:, k, None] + Dp[None, k, :]
        if viol.any():
            i, j = np.argwhere(viol)[0]
            raise PseudoMetricViolation(f"triangle inequality fails for ({i},{j}) via {k}")


def build_quotient(pg: PointedGraph, check: bool = True) -> QuotientMetric:
    """Quotient of the vertex set by d' = 0.

    Classes are ordered by smallest member.  With ``check`` the pseudo-metric
    axioms of d' are verified over all vertex triples and dist_Y is checked to
    be independent of representatives.
    """
    Dp = d_prime_matrix(pg)
    if check:
        _check_pseudometric(Dp)
    n = pg.n
    class_of = [-1] * n
    classes = []
    for v in range(n):
        if class_of[v] >= 0:
            continue
        members = [int(w) for w in np.flatnonzero(Dp[v] == 0)]
        for w in members:
            class_of[w] = len(classes)
        classes.append(tuple(members))
    reps = [c[0] for c in classes]
    dist_Y = Dp[np.ix_(reps, reps)].copy()
    if check:
        cls = np.asarray(class_of)
        if not (dist_Y[np.ix_(cls, cls)] == Dp).all():
            raise PseudoMetricViolation("d' is not constant on pairs of classes")
        off = ~np.eye(len(classes), dtype=bool)
        if (dist_Y[off] <= 0).any():
            raise PseudoMetricViolation("distinct classes at distance 0")
    dist_Y.setflags(write=False)
    return QuotientMetric(tuple(classes), tuple(class_of), dist_Y, class_of[pg.basepoint])


def four_point_defect(qm: QuotientMetric) -> int:
    """max of d(x,y)+d(z,w) - max(d(x,z)+d(y,w), d(x,w)+d(y,z)); <= 0 iff tree metric."""
    return int(kernels.four_point_defect(qm.dist_Y))


def pulled_back(pg: PointedGraph, qm: QuotientMetric) -> np.ndarray:
    """d_Y(g(x1), g(x2)) as a vertex-indexed matrix."""
    cls = np.asarray(qm.class_of)
    return qm.dist_Y[np.ix_(cls, cls)]


def delta_star(pg: PointedGraph, qm: QuotientMetric) -> int:
    """Smallest Δ with d_X - Δ <= d_Y∘g <= d_X; raises if the upper bound fails."""
    DY = pulled_back(pg, qm)
    gap = pg.dist.astype(np.int64) - DY
    if (gap < 0).any():
        i, j = np.argwhere(gap < 0)[0]
        raise UpperBoundViolation(f"d_Y > d_X for vertices ({i},{j})")
    return int(gap.max())


def right_inverse_h(qm: QuotientMetric, pg: PointedGraph | None = None) -> tuple[int, ...]:
    """Section of the quotient map: each class goes to its smallest member.

    The base class is always {o}, so h(g(o)) = o.  If ``pg`` is given, the
    (1 + Δ*)-Lipschitz bound of h is verified.
    """
    h = tuple(c[0] for c in qm.classes)
    if pg is not None:
        if h[qm.base_class] != pg.basepoint:
            raise QTFError("base class does not map to the basepoint")
        dstar = delta_star(pg, qm)
        DX = pg.dist[np.ix_(h, h)].astype(np.int64)
        if (DX > (1 + dstar) * qm.dist_Y).any():
            raise UpperBoundViolation("h is not (1 + Δ*)-Lipschitz")
    return h


def delta_eff(pg: PointedGraph, qm: QuotientMetric, h=None) -> int:
    """max_x d(x, h(g(x)))."""
    h = right_inverse_h(qm) if h is None else h
    return max(pg.d(x, h[qm.class_of[x]]) for x in range(pg.n))


# ---------------------------------------------------------------------------
# finite tree realization


@dataclass
class TreeRealization:
    """Weighted tree whose path metric restricts to dist_Y on the class nodes.

    ``labels[i]`` is ``("class", c)`` for the image of class c and
    ``("branch", k)`` for a synthesized node.
    """

    labels: list[tuple[str, int]]
    adj: list[dict[int, Fraction]]
    embedding: dict[int, int]

    def add_node(self, label) -> int:
        self.labels.append(label)
        self.adj.append({})
        if label[0] == "class":
            self.embedding[label[1]] = len(self.labels) - 1
        return len(self.labels) - 1

    def connect(self, u: int, v: int, length: Fraction) -> None:
        if length <= 0:
            raise QTFError(f"non-positive edge length {length}")
        self.adj[u][v] = length
        self.adj[v][u] = length

    def disconnect(self, u: int, v: int) -> None:
        del self.adj[u][v]
        del self.adj[v][u]

    def degree(self, node: int) -> int:
        return len(self.adj[node])

    @property
    def edges(self):
        return [(u, v, w) for u, nb in enumerate(self.adj) for v, w in nb.items() if u < v]

    def synthesized(self) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab[0] == "branch"]

    def distances_from(self, src: int) -> dict[int, Fraction]:
        dist = {src: Fraction(0)}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v, w in self.adj[u].items():
                if v not in dist:
                    dist[v] = dist[u] + w
                    queue.append(v)
        return dist

    def path(self, a: int, b: int) -> list[int]:
        parent = {a: None}
        queue = deque([a])
        while queue:
            u = queue.popleft()
            if u == b:
                break
            for v in self.adj[u]:
                if v not in parent:
                    parent[v] = u
                    queue.append(v)
        out = [b]
        while out[-1] != a:
            out.append(parent[out[-1]])
        return out[::-1]

    def is_tree(self) -> bool:
        n = len(self.labels)
        return len(self.edges) == n - 1 and len(self.distances_from(0)) == n

    def to_json(self) -> dict:
        return {
            "nodes": [f"{kind}:{idx}" for kind, idx in self.labels],
            "edges": [[u, v, str(w)] for u, v, w in self.edges],
        }


def insertion_order(qm: QuotientMetric) -> list[int]:
    """Classes by distance from the base class, ties by smallest member."""
    base = qm.base_class
    return sorted(range(qm.size), key=lambda c: (int(qm.dist_Y[base, c]), qm.classes[c][0]))


def realize_tree(qm: QuotientMetric, check: bool = True) -> TreeRealization:
    """Insert classes one at a time, each hung off the subtree spanned so far.

    With a = the first inserted class, the attachment point of a new class c
    lies on the path from a to the inserted class b maximizing the Gromov
    product (c|b)_a, at distance (c|b)_a from a.  If that point is inside an
    edge, the edge is split by a synthesized node (or by c itself when the
    pendant length is zero).
    """
    defect = four_point_defect(qm)
    if defect > 0:
        raise NotTreeMetric(defect)
    D = qm.dist_Y
    order = insertion_order(qm)
    tr = TreeRealization([], [], {})
    a = order[0]
    tr.add_node(("class", a))
    n_branch = 0
    inserted = [a]
    for c in order[1:]:
        dac = int(D[a, c])
        best_b, t = a, Fraction(0)
        for b in inserted:
            gp = Fraction(dac + int(D[a, b]) - int(D[b, c]), 2)
            if gp > t:
                best_b, t = b, gp
        pendant = dac - t
        path = tr.path(tr.embedding[a], tr.embedding[best_b])
        # walk to the point at distance t from a along the path
        walked = Fraction(0)
        point = None
        for u, v in zip(path, path[1:]):
            w = tr.adj[u][v]
            if walked == t:
                point = ("node", u)
                break
            if walked + w > t:
                point = ("edge", u, v, t - walked)
                break
            walked += w
        if point is None:
            point = ("node", path[-1])
        if point[0] == "edge":
            _, u, v, off = point
            w = tr.adj[u][v]
            tr.disconnect(u, v)
            if pendant == 0:
                mid = tr.add_node(("class", c))
            else:
                mid = tr.add_node(("branch", n_branch))
                n_branch += 1
            tr.connect(u, mid, off)
            tr.connect(mid, v, w - off)
            if pendant > 0:
                tr.connect(mid, tr.add_node(("class", c)), pendant)
        else:
            node = point[1]
            if pendant > 0:
                tr.connect(node, tr.add_node(("class", c)), pendant)
            elif tr.labels[node][0] == "branch":
                tr.labels[node] = ("class", c)
                tr.embedding[c] = node
            else:
                raise QTFError(f"classes {tr.labels[node][1]} and {c} at distance 0")
        inserted.append(c)
    if check:
        verify_realization(qm, tr)
    return tr


def verify_realization(qm: QuotientMetric, tr: TreeRealization) -> None:
    if not tr.is_tree():
        raise QTFError("realization is not a tree")
    for c in range(qm.size):
        dist = tr.distances_from(tr.embedding[c])
        for c2 in range(qm.size):
            if dist[tr.embedding[c2]] != int(qm.dist_Y[c, c2]):
                raise QTFError(f"realized distance between classes {c},{c2} is "
                               f"{dist[tr.embedding[c2]]}, expected {qm.dist_Y[c, c2]}")


def branch_points_in_image(qm: QuotientMetric, tr: TreeRealization) -> tuple[bool, list[int]]:
    """Check that every node of degree >= 3 is a class image.

    Returns (ok, offending synthesized nodes).
    """
    bad = [i for i in tr.synthesized() if tr.degree(i) >= 3]
    return not bad, bad


def analyze(pg: PointedGraph) -> dict:
    """Run the whole Kerr pipeline on one graph and collect the results."""
    qm = build_quotient(pg)
    defect = four_point_defect(qm)
    dstar = delta_star(pg, qm)
    h = right_inverse_h(qm, pg)
    out = {
        "quotient": qm,
        "delta_star": dstar,
        "defect": defect,
        "h": h,
        "delta_eff": delta_eff(pg, qm, h),
        "realization": None,
        "branch_ok": None,
        "branch_witness": [],
    }
    if defect <= 0:
        tr = realize_tree(qm)
        ok, bad = branch_points_in_image(qm, tr)
        out.update(realization=tr, branch_ok=ok, branch_witness=bad)
    return out
