"""Lipschitz-free norms on finite pointed graphs, and the maps between free spaces.

Two independent routes compute the norm of a finitely supported vector:

* :func:`free_norm_dual` maximizes the pairing over 1-Lipschitz functions
  vanishing at the basepoint.  Only edge constraints are imposed: on a graph
  the Lipschitz constant is the largest jump across an edge.
* :func:`free_norm_flow` solves the transport problem, with the total mass
  balanced at the basepoint, by successive shortest paths.

All arithmetic is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import NamedTuple

from ._flow import min_cost_transshipment
from ._lp import max_potential
from .errors import BoundViolation, InvalidInput, QTFError
from .graph_metric import PointedGraph
from .kerr_tree import QuotientMetric, TreeRealization, right_inverse_h


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions or "p/q" strings (floats are rejected)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise InvalidInput(f"expected an exact rational, got {value!r}")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InvalidInput(f"not a rational: {value!r}") from None


class FreeVector:
    """Finite combination of point masses; the basepoint mass is always dropped."""

    __slots__ = ("coeffs", "basepoint")

    def __init__(self, coeffs, basepoint):
        self.basepoint = basepoint
        self.coeffs = {k: Fraction(v) for k, v in coeffs.items() if v != 0 and k != basepoint}

    @classmethod
    def delta(cls, x, basepoint) -> "FreeVector":
        return cls({x: 1}, basepoint)

    @classmethod
    def zero(cls, basepoint) -> "FreeVector":
        return cls({}, basepoint)

    def _combine(self, other, sign):
        if not isinstance(other, FreeVector):
            return NotImplemented
        if other.basepoint != self.basepoint:
            raise ValueError("vectors over different basepoints")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + sign * v
        return FreeVector(out, self.basepoint)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return FreeVector({k: -v for k, v in self.coeffs.items()}, self.basepoint)

    def __mul__(self, scalar):
        return FreeVector({k: v * scalar for k, v in self.coeffs.items()}, self.basepoint)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, FreeVector) and self.basepoint == other.basepoint and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.basepoint, frozenset(self.coeffs.items())))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        terms = " + ".join(f"{v}·δ{k}" for k, v in sorted(self.coeffs.items(), key=lambda kv: repr(kv[0])))
        return f"FreeVector({terms or '0'})"

    def support(self):
        return sorted(self.coeffs, key=repr)

    def mass(self) -> Fraction:
        return sum(self.coeffs.values(), Fraction(0))

    def to_json(self) -> dict:
        return {"coeffs": {str(k): str(v) for k, v in sorted(self.coeffs.items())}}


def parse_free_vector(data, pg: PointedGraph) -> tuple[FreeVector, list[str]]:
    """Read ``{"coeffs": {"vertex": "p/q", ...}}``; returns (vector, warnings)."""
    if not isinstance(data, dict) or not isinstance(data.get("coeffs"), dict):
        raise InvalidInput('vector JSON must look like {"coeffs": {"vertex": "p/q"}}')
    warnings = []
    coeffs = {}
    for key, val in data["coeffs"].items():
        try:
            v = int(key)
        except ValueError:
            raise InvalidInput(f"vertex key {key!r} is not an integer") from None
        if not 0 <= v < pg.n:
            raise InvalidInput(f"vertex {v} out of range")
        q = as_fraction(val)
        if v == pg.basepoint and q != 0:
            warnings.append(f"coefficient {q} at basepoint {v} dropped (delta_o = 0)")
            continue
        coeffs[v] = coeffs.get(v, 0) + q
    return FreeVector(coeffs, pg.basepoint), warnings


@dataclass(frozen=True)
class LipFunction:
    """Vertex function vanishing at the basepoint."""

    values: tuple[Fraction, ...]
    basepoint: int

    def __post_init__(self):
        if self.values[self.basepoint] != 0:
            raise InvalidInput("Lipschitz function must vanish at the basepoint")

    @classmethod
    def from_values(cls, values, basepoint) -> "LipFunction":
        return cls(tuple(Fraction(v) for v in values), basepoint)

    def __call__(self, x):
        return self.values[x]

    def pair(self, mu: FreeVector) -> Fraction:
        return sum((c * self.values[x] for x, c in mu.coeffs.items()), Fraction(0))

    def sup_norm(self) -> Fraction:
        return max(abs(v) for v in self.values)


def lip_norm(f: LipFunction, pg: PointedGraph) -> Fraction:
    """Lipschitz constant as the largest jump across an edge."""
    return max((abs(f.values[u] - f.values[v]) for u, v in pg.edges), default=Fraction(0))


def lip_norm_all_pairs(f: LipFunction, pg: PointedGraph) -> Fraction:
    """Brute-force sup of |f(x) - f(y)| / d(x, y) over all pairs."""
    best = Fraction(0)
    for x in range(pg.n):
        for y in range(x + 1, pg.n):
            best = max(best, abs(f.values[x] - f.values[y]) / pg.d(x, y))
    return best


def _scaled(mu: FreeVector) -> tuple[int, dict]:
    scale = lcm(*(v.denominator for v in mu.coeffs.values())) if mu.coeffs else 1
    return scale, {x: int(v * scale) for x, v in mu.coeffs.items()}


def _pruned_arcs(pg: PointedGraph, keep):
    """Edge list after repeatedly deleting leaves outside ``keep``.

    A deleted leaf can copy its neighbour's value without changing the LP
    optimum.  Returns (arcs on local indices, local index map, removal order).
    """
    adj = {v: set() for v in range(pg.n)}
    for u, v in pg.edges:
        adj[u].add(v)
        adj[v].add(u)
    removed = []
    stack = [v for v in adj if len(adj[v]) == 1 and v not in keep]
    while stack:
        v = stack.pop()
        if v not in adj or len(adj[v]) != 1 or v in keep:
            continue
        (w,) = adj.pop(v)
        adj[w].discard(v)
        removed.append((v, w))
        if len(adj[w]) == 1 and w not in keep:
            stack.append(w)
    local = {v: i for i, v in enumerate(sorted(adj))}
    arcs = [(local[u], local[v], 1) for u in adj for v in adj[u] if u < v]
    return arcs, local, removed


def solve_dual(mu: FreeVector, pg: PointedGraph) -> tuple[Fraction, LipFunction]:
    """Optimal value and an optimal 1-Lipschitz certificate f with f(o) = 0."""
    if mu.basepoint != pg.basepoint:
        raise InvalidInput("vector and graph disagree on the basepoint")
    if not mu:
        return Fraction(0), LipFunction.from_values([0] * pg.n, pg.basepoint)
    scale, c = _scaled(mu)
    arcs, local, removed = _pruned_arcs(pg, set(mu.coeffs) | {pg.basepoint})
    inv = {i: v for v, i in local.items()}
    obj = [c.get(inv[i], 0) for i in range(len(local))]
    value, f_local = max_potential(len(local), arcs, local[pg.basepoint], obj)
    f = [0] * pg.n
    for i, val in enumerate(f_local):
        f[inv[i]] = val
    for v, w in reversed(removed):
        f[v] = f[w]
    return Fraction(value, scale), LipFunction.from_values(f, pg.basepoint)


def free_norm_dual(mu: FreeVector, pg: PointedGraph) -> Fraction:
    return solve_dual(mu, pg)[0]


def solve_flow(mu: FreeVector, pg: PointedGraph) -> tuple[Fraction, dict]:
    """Optimal transport cost and the net edge flows (in units of the input)."""
    if mu.basepoint != pg.basepoint:
        raise InvalidInput("vector and graph disagree on the basepoint")
    if not mu:
        return Fraction(0), {}
    scale, c = _scaled(mu)
    supply = [0] * pg.n
    for x, v in c.items():
        supply[x] = v
    supply[pg.basepoint] = -sum(c.values())
    arcs = [(u, v, 1) for u, v in pg.edges]
    cost, flows = min_cost_transshipment(pg.n, arcs, supply)
    return Fraction(cost, scale), {e: Fraction(f, scale) for e, f in flows.items()}


def free_norm_flow(mu: FreeVector, pg: PointedGraph) -> Fraction:
    return solve_flow(mu, pg)[0]


def free_norm_metric(nu: FreeVector, dist, base: int) -> Fraction:
    """Free norm over a finite integer metric (all-pairs constraints)."""
    k = len(dist)
    if not nu:
        return Fraction(0)
    scale, c = _scaled(nu)
    arcs = [(i, j, int(dist[i][j])) for i in range(k) for j in range(i + 1, k)]
    value, _ = max_potential(k, arcs, base, [c.get(i, 0) for i in range(k)])
    return Fraction(value, scale)


def free_norm_tree(nu: FreeVector, qm: QuotientMetric, tr: TreeRealization) -> Fraction:
    """Free norm over the realized tree: sum of edge length times the mass beyond the edge."""
    root = tr.embedding[qm.base_class]
    mass = [Fraction(0)] * len(tr.labels)
    for c, v in nu.coeffs.items():
        mass[tr.embedding[c]] += v
    order, parent = [root], {root: None}
    for u in order:
        for v in tr.adj[u]:
            if v not in parent:
                parent[v] = u
                order.append(v)
    total = Fraction(0)
    for v in reversed(order[1:]):
        p = parent[v]
        total += tr.adj[v][p] * abs(mass[v])
        mass[p] += mass[v]
    return total


# ---------------------------------------------------------------------------
# maps induced by the Kerr quotient


def pushforward(qm: QuotientMetric, mu: FreeVector) -> FreeVector:
    """Push masses to their classes; the base class absorbs (and drops) its mass."""
    out: dict[int, Fraction] = {}
    for x, v in mu.coeffs.items():
        c = qm.class_of[x]
        out[c] = out.get(c, 0) + v
    return FreeVector(out, qm.base_class)


def lift(h, nu: FreeVector, basepoint) -> FreeVector:
    """φ_h: move each class mass to its chosen representative."""
    out: dict[int, Fraction] = {}
    for c, v in nu.coeffs.items():
        out[h[c]] = out.get(h[c], 0) + v
    return FreeVector(out, basepoint)


def projection_P(qm: QuotientMetric, h, mu: FreeVector, check: bool = True) -> FreeVector:
    """P = φ_h ∘ φ_g.  With ``check``: P(Pμ) = Pμ and μ - Pμ lies in Ker φ_g."""
    Pmu = lift(h, pushforward(qm, mu), mu.basepoint)
    if check:
        if lift(h, pushforward(qm, Pmu), mu.basepoint) != Pmu:
            raise QTFError("projection is not idempotent")
        if pushforward(qm, mu - Pmu):
            raise QTFError("μ - Pμ is not in the kernel of the pushforward")
    return Pmu


class KernelBounds(NamedTuple):
    sup_norm: Fraction
    lip: Fraction
    ratio: Fraction
    lower: Fraction
    upper: int


def ker_dual_bounds(f: LipFunction, pg: PointedGraph, qm: QuotientMetric, h=None,
                    delta: int | None = None) -> KernelBounds:
    """Check ½ Lip(f) <= ||f||_∞ <= Δ_eff Lip(f) for f vanishing on h(image).

    ``delta`` defaults to Δ_eff = max_x d(x, h(g(x))).
    """
    h = right_inverse_h(qm) if h is None else h
    for c in range(qm.size):
        if f.values[h[c]] != 0:
            raise InvalidInput(f"f does not vanish on h-image vertex {h[c]}")
    if delta is None:
        delta = max(pg.d(x, h[qm.class_of[x]]) for x in range(pg.n))
    sup = f.sup_norm()
    lip = lip_norm(f, pg)
    if sup == 0:
        raise InvalidInput("f must not vanish identically")
    ratio = sup / lip
    if not (lip / 2 <= sup <= delta * lip):
        raise BoundViolation(f"||f||_inf = {sup}, Lip = {lip}, Δ = {delta}")
    return KernelBounds(sup, lip, ratio, Fraction(1, 2), delta)


def decomposition_ratio(mu: FreeVector, pg: PointedGraph, qm: QuotientMetric,
                        tr: TreeRealization, h=None) -> Fraction:
    """(||φ_g μ||_Y + ||μ - Pμ||_X) / ||μ||_X for a nonzero μ."""
    h = right_inverse_h(qm) if h is None else h
    norm = free_norm_flow(mu, pg)
    if norm == 0:
        raise InvalidInput("μ must be nonzero")
    quotient_part = free_norm_tree(pushforward(qm, mu), qm, tr)
    kernel_part = free_norm_flow(mu - projection_P(qm, h, mu), pg)
    return (quotient_part + kernel_part) / norm


def check_pushforward_contraction(mu: FreeVector, pg: PointedGraph, qm: QuotientMetric,
                                  tr: TreeRealization) -> tuple[Fraction, Fraction]:
    """Return (||φ_g μ||_Y, ||μ||_X) after asserting the first is not larger."""
    ny = free_norm_tree(pushforward(qm, mu), qm, tr)
    nx = free_norm_flow(mu, pg)
    if ny > nx:
        raise BoundViolation(f"pushforward expands the norm: {ny} > {nx}")
    return ny, nx


def random_free_vector(rng, pg: PointedGraph, max_support: int = 5, vertices=None) -> FreeVector:
    """Nonzero random vector supported away from the basepoint."""
    pool = [v for v in (range(pg.n) if vertices is None else vertices) if v != pg.basepoint]
    if not pool:
        return FreeVector.zero(pg.basepoint)
    k = rng.randint(1, min(max_support, len(pool)))
    return FreeVector({v: rng.fraction() for v in rng.sample(pool, k)}, pg.basepoint)


def random_kernel_function(rng, pg: PointedGraph, qm: QuotientMetric, h=None) -> LipFunction | None:
    """Random f vanishing on h(image) and nonzero elsewhere; None if h is onto."""
    h = right_inverse_h(qm) if h is None else h
    image = set(h)
    free = [v for v in range(pg.n) if v not in image]
    if not free:
        return None
    vals = [Fraction(0)] * pg.n
    for v in free:
        vals[v] = rng.fraction(max_num=9, max_den=5) if rng.randbelow(4) else Fraction(0)
    if all(vals[v] == 0 for v in free):
        vals[free[0]] = Fraction(1)
    return LipFunction.from_values(vals, pg.basepoint)
