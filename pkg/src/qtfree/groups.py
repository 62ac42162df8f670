"""Groups given by explicit normal forms.

Only families with easy normal forms are supported: finite groups from a
multiplication table, free groups, and free and direct products of these.
Elements are hashable tuples/ints in normal form, so equality is structural.

Ball enumeration is breadth first with generators in a fixed order, which
lists elements in shortlex order of their geodesic words.  Metric data read
off a finite ball is exact only for pairs whose geodesics stay inside it.
"""
from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import BallTooLarge, InvalidInput, NotAGroup, NotInSubgroup, QTFError
from .graph_metric import PointedGraph, build_pointed_graph

DEFAULT_CAP = 20000


def default_cap() -> int:
    """Ball size cap; the QTF_CAP environment variable overrides the default."""
    env = os.environ.get("QTF_CAP")
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise InvalidInput(f"QTF_CAP must be an integer, got {env!r}") from None
        if cap <= 0:
            raise InvalidInput("QTF_CAP must be positive")
        return cap
    return DEFAULT_CAP


class Group:
    """Common interface: identity, mul, inv, generators, ball, word_length."""

    identity = None
    generators: tuple = ()
    name = "group"

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def format(self, g) -> str:
        return str(g)

    def prod(self, *elems):
        out = self.identity
        for g in elems:
            out = self.mul(out, g)
        return out

    @property
    def order(self):
        """Number of elements, or None if infinite."""
        return None

    def elements(self):
        if self.order is None:
            raise QTFError(f"{self.name} is infinite")
        return self.ball(self.order)

    def ball(self, radius: int, cap: int | None = None) -> list:
        """Elements of word length <= radius in shortlex order."""
        cap = default_cap() if cap is None else cap
        seen = {self.identity: 0}
        out = [self.identity]
        frontier = [self.identity]
        for r in range(1, radius + 1):
            nxt = []
            for g in frontier:
                for s in self.generators:
                    h = self.mul(g, s)
                    if h not in seen:
                        seen[h] = r
                        nxt.append(h)
                        out.append(h)
                        if len(out) > cap:
                            raise BallTooLarge(len(out), cap)
            if not nxt:
                break
            frontier = nxt
        return out

    def word_length(self, g) -> int:
        """BFS fallback; subclasses with closed forms override."""
        if g == self.identity:
            return 0
        seen = {self.identity}
        frontier = [self.identity]
        r = 0
        while frontier:
            r += 1
            nxt = []
            for h in frontier:
                for s in self.generators:
                    k = self.mul(h, s)
                    if k == g:
                        return r
                    if k not in seen:
                        seen.add(k)
                        nxt.append(k)
            frontier = nxt
        raise QTFError(f"{self.format(g)} not reachable from the generators")

    def sphere_sizes(self, radius):
        counts = [0] * (radius + 1)
        for g in self.ball(radius):
            counts[self.word_length(g)] += 1
        return counts

    def __repr__(self):
        return f"<{self.name}>"


class FiniteGroup(Group):
    """Group on 0..n-1 from a multiplication table."""

    def __init__(self, table, generators=None, name="finite", labels=None):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        n = len(self.table)
        self._check(n)
        self.identity = next(e for e in range(n) if all(self.table[e][x] == x == self.table[x][e] for x in range(n)))
        self._inv = tuple(next(y for y in range(n) if self.table[x][y] == self.identity) for x in range(n))
        if generators is None:
            generators = [g for g in range(n) if g != self.identity]
        gens = list(dict.fromkeys(int(g) for g in generators))
        for g in list(gens):
            if self._inv[g] not in gens:
                gens.append(self._inv[g])
        self.generators = tuple(gens)
        self.name = name
        self.labels = labels
        if len(self.ball(n)) != n:
            raise InvalidInput(f"generators {self.generators} do not generate {name}")
        self._lengths = _bfs_lengths(self)

    def _check(self, n):
        if n == 0 or any(len(row) != n for row in self.table):
            raise NotAGroup("square table")
        for i, row in enumerate(self.table):
            for j, x in enumerate(row):
                if not 0 <= x < n:
                    raise NotAGroup("closure", (i, j))
        ids = [e for e in range(n) if all(self.table[e][x] == x == self.table[x][e] for x in range(n))]
        if not ids:
            raise NotAGroup("identity")
        e = ids[0]
        for x in range(n):
            if not any(self.table[x][y] == e and self.table[y][x] == e for y in range(n)):
                raise NotAGroup("inverses", x)
        for a, b, c in itertools.product(range(n), repeat=3):
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise NotAGroup("associativity", (a, b, c))

    @property
    def order(self):
        return len(self.table)

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self._inv[a]

    def word_length(self, g) -> int:
        return self._lengths[g]

    def format(self, g):
        return self.labels[g] if self.labels else str(g)


def _bfs_lengths(G: Group) -> dict:
    lengths = {G.identity: 0}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for g in frontier:
            for s in G.generators:
                h = G.mul(g, s)
                if h not in lengths:
                    lengths[h] = lengths[g] + 1
                    nxt.append(h)
        frontier = nxt
    return lengths


def make_finite_group(table, generators=None, name="finite") -> FiniteGroup:
    return FiniteGroup(table, generators, name)


def cyclic_group(n: int) -> FiniteGroup:
    """Z/n with generators {1, -1}."""
    if n < 1:
        raise InvalidInput("cyclic order must be positive")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    gens = [1 % n, (n - 1) % n] if n > 1 else []
    return FiniteGroup(table, gens, name=f"Z/{n}")


class FreeGroup(Group):
    """Reduced words as tuples of nonzero ints; +i is generator i, -i its inverse."""

    def __init__(self, rank: int):
        if rank < 1:
            raise InvalidInput("free group rank must be >= 1")
        self.rank = rank
        self.identity = ()
        self.generators = tuple((s * i,) for i in range(1, rank + 1) for s in (1, -1))
        self.name = "Z" if rank == 1 else f"F{rank}"

    def mul(self, a, b):
        a = list(a)
        i = 0
        while a and i < len(b) and a[-1] == -b[i]:
            a.pop()
            i += 1
        return tuple(a) + tuple(b[i:])

    def inv(self, a):
        return tuple(-x for x in reversed(a))

    def word_length(self, g):
        return len(g)

    def format(self, g):
        if not g:
            return "e"
        letters = "abcdefghijklmnopqrstuvwxyz"
        return "".join(letters[abs(x) - 1] + ("" if x > 0 else "'") for x in g)


def make_free_group(rank: int) -> FreeGroup:
    return FreeGroup(rank)


class FreeProduct(Group):
    """Alternating sequences of (factor, nontrivial element) pairs."""

    def __init__(self, A: Group, B: Group):
        self.factors = (A, B)
        self.identity = ()
        self.generators = tuple(((0, s),) for s in A.generators) + tuple(((1, t),) for t in B.generators)
        self.name = f"({A.name} * {B.name})"

    def letter(self, factor, g):
        """The element consisting of a single letter (identity if g is trivial)."""
        return () if g == self.factors[factor].identity else ((factor, g),)

    def mul(self, a, b):
        a = list(a)
        b = list(b)
        while a and b and a[-1][0] == b[0][0]:
            f = a[-1][0]
            F = self.factors[f]
            g = F.mul(a[-1][1], b[0][1])
            a.pop()
            b.pop(0)
            if g != F.identity:
                a.append((f, g))
                break
        return tuple(a) + tuple(b)

    def inv(self, a):
        return tuple((f, self.factors[f].inv(g)) for f, g in reversed(a))

    def word_length(self, g):
        return sum(self.factors[f].word_length(x) for f, x in g)

    @staticmethod
    def syllables(g) -> int:
        return len(g)

    def is_reduced(self, word) -> bool:
        for i, (f, x) in enumerate(word):
            if f not in (0, 1) or x == self.factors[f].identity:
                return False
            if i and word[i - 1][0] == f:
                return False
        return True

    def format(self, g):
        if not g:
            return "e"
        return "·".join(f"{'ab'[f]}{self.factors[f].format(x)}" for f, x in g)


def make_free_product(A: Group, B: Group) -> FreeProduct:
    return FreeProduct(A, B)


class DirectProduct(Group):
    def __init__(self, A: Group, B: Group):
        self.factors = (A, B)
        self.identity = (A.identity, B.identity)
        self.generators = tuple((s, B.identity) for s in A.generators) + tuple((A.identity, t) for t in B.generators)
        self.name = f"({A.name} x {B.name})"

    def mul(self, a, b):
        A, B = self.factors
        return (A.mul(a[0], b[0]), B.mul(a[1], b[1]))

    def inv(self, a):
        A, B = self.factors
        return (A.inv(a[0]), B.inv(a[1]))

    def word_length(self, g):
        A, B = self.factors
        return A.word_length(g[0]) + B.word_length(g[1])

    @property
    def order(self):
        A, B = self.factors
        if A.order is None or B.order is None:
            return None
        return A.order * B.order

    def format(self, g):
        A, B = self.factors
        return f"({A.format(g[0])},{B.format(g[1])})"


def make_direct_product(A: Group, B: Group) -> DirectProduct:
    return DirectProduct(A, B)


_TOKEN = re.compile(r"\s*(free|cyclic|z|product|direct|\(|\)|,|:|\d+)", re.I)


@lru_cache(maxsize=None)
def parse_group(spec: str) -> Group:
    """Parse "free:2", "cyclic:6", "z", "product(A,B)" (free product), "direct(A,B)"."""
    tokens = []
    pos = 0
    spec_s = spec.strip()
    while pos < len(spec_s):
        m = _TOKEN.match(spec_s, pos)
        if not m:
            raise InvalidInput(f"bad group spec {spec!r} at position {pos}")
        tokens.append(m.group(1).lower())
        pos = m.end()
    it = iter(tokens + [None])
    tok = [next(it)]

    def take(expected=None):
        t = tok[0]
        if expected is not None and t != expected:
            raise InvalidInput(f"bad group spec {spec!r}: expected {expected!r}, got {t!r}")
        tok[0] = next(it, None)
        return t

    def parse():
        t = take()
        if t in ("free", "cyclic"):
            take(":")
            num = take()
            if num is None or not num.isdigit():
                raise InvalidInput(f"bad group spec {spec!r}: expected a number")
            return make_free_group(int(num)) if t == "free" else cyclic_group(int(num))
        if t == "z":
            return make_free_group(1)
        if t in ("product", "direct"):
            take("(")
            a = parse()
            take(",")
            b = parse()
            take(")")
            return make_free_product(a, b) if t == "product" else make_direct_product(a, b)
        raise InvalidInput(f"bad group spec {spec!r}: unexpected {t!r}")

    G = parse()
    if tok[0] is not None:
        raise InvalidInput(f"bad group spec {spec!r}: trailing {tok[0]!r}")
    return G


# ---------------------------------------------------------------------------
# Cayley balls


@dataclass(frozen=True)
class CayleyBall:
    group: Group
    radius: int
    pg: PointedGraph
    elements: tuple
    index: dict = field(repr=False, compare=False)

    def vertex(self, g):
        return self.index.get(g)


def cayley_ball(G: Group, radius: int, cap: int | None = None) -> CayleyBall:
    """Ball of the Cayley graph with edges u ~ us (s a generator), based at e.

    Distances inside the ball equal word lengths for elements near the centre;
    pairs near the boundary may see a truncated metric.
    """
    elems = G.ball(radius, cap)
    index = {g: i for i, g in enumerate(elems)}
    edges = set()
    for i, g in enumerate(elems):
        for s in G.generators:
            j = index.get(G.mul(g, s))
            if j is not None and j != i:
                edges.add((min(i, j), max(i, j)))
    pg = build_pointed_graph(len(elems), sorted(edges), 0)
    return CayleyBall(G, radius, pg, tuple(elems), index)


# ---------------------------------------------------------------------------
# finite-index subgroups


@dataclass(frozen=True)
class CosetSection:
    """Representatives ω(x) of the cosets x = gH, with ω(H) = e.

    A coset is identified with its representative.
    """

    group: Group
    in_subgroup: object
    reps: tuple

    @property
    def index(self) -> int:
        return len(self.reps)

    def coset_of(self, g):
        G = self.group
        for w in self.reps:
            if self.in_subgroup(G.mul(G.inv(w), g)):
                return w
        raise QTFError(f"{G.format(g)} lies in no listed coset; section incomplete")

    def act(self, s, x):
        """s · x for a coset x."""
        return self.coset_of(self.group.mul(s, x))

    def factor(self, g):
        """(ω, t) with g = ω t and t in H."""
        w = self.coset_of(g)
        return w, self.group.mul(self.group.inv(w), g)


def make_coset_section(G: Group, in_subgroup, index: int | None = None, search_radius: int = 8,
                       cap: int | None = None) -> CosetSection:
    """Shortlex-first representatives found in the ball of ``search_radius``."""
    if not in_subgroup(G.identity):
        raise InvalidInput("membership test rejects the identity")
    reps = [G.identity]
    for g in G.ball(search_radius, cap):
        if index is not None and len(reps) == index:
            break
        if all(not in_subgroup(G.mul(G.inv(w), g)) for w in reps):
            reps.append(g)
    if index is not None and len(reps) != index:
        raise QTFError(f"found {len(reps)} cosets within radius {search_radius}, expected {index}")
    return CosetSection(G, in_subgroup, tuple(reps))


def alpha(section: CosetSection, s, x):
    """ω(s x)^{-1} s ω(x), which lies in H."""
    G = section.group
    out = G.prod(G.inv(section.act(s, x)), s, x)
    if not section.in_subgroup(out):
        raise NotInSubgroup(f"alpha({G.format(s)}, {G.format(x)}H) = {G.format(out)} not in H")
    return out


def check_alpha_chain_rule(section: CosetSection, elements) -> list:
    """Triples (s, t, x) where α(st, x) != α(s, tx) α(t, x)."""
    G = section.group
    bad = []
    for s in elements:
        for t in elements:
            st = G.mul(s, t)
            for x in section.reps:
                lhs = alpha(section, st, x)
                rhs = G.mul(alpha(section, s, section.act(t, x)), alpha(section, t, x))
                if lhs != rhs:
                    bad.append((s, t, x))
    return bad


def check_coset_decomposition(section: CosetSection, elements) -> list:
    """Elements g whose factorization g = ω t (t in H) is missing or not unique."""
    G = section.group
    bad = []
    for g in elements:
        hits = [w for w in section.reps if section.in_subgroup(G.mul(G.inv(w), g))]
        if len(hits) != 1:
            bad.append(g)
    return bad


def dihedral_infinite():
    """Z/2 * Z/2 = <a, b>, its index-2 subgroup H = <ab> and an iso H -> Z.

    H is the set of even-length words; (ab)^n maps to n.
    """
    G = make_free_product(cyclic_group(2), cyclic_group(2))

    def in_h(g):
        return len(g) % 2 == 0

    def to_int(g):
        if not in_h(g):
            raise NotInSubgroup(f"{G.format(g)} has odd length")
        if not g:
            return 0
        n = len(g) // 2
        return n if g[0][0] == 0 else -n

    return G, in_h, to_int


# ---------------------------------------------------------------------------
# Bass-Serre trees of free products


@dataclass(frozen=True)
class BassSerreBall:
    """Vertices (factor, canonical word) for the cosets wΓ (factor 0) and wΛ (factor 1)."""

    group: FreeProduct
    radius: int
    pg: PointedGraph
    labels: tuple
    index: dict = field(repr=False, compare=False)

    def act(self, g, v: int):
        """Vertex index of g·v, or None when it falls outside the ball."""
        f, w = self.labels[v]
        return self.index.get(coset_label(self.group, f, self.group.mul(g, w)))

    def full_degree(self, v: int):
        return self.group.factors[self.labels[v][0]].order


def coset_label(G: FreeProduct, factor: int, s):
    """Canonical representative of s·(factor subgroup): drop a trailing letter from that factor."""
    if s and s[-1][0] == factor:
        s = s[:-1]
    return (factor, s)


def bass_serre_ball(gamma: Group, lam: Group, radius: int, cap: int | None = None) -> BassSerreBall:
    """Edges {sΓ, sΛ} for all s of word length < radius; base vertex Γ.

    Acyclicity is asserted: the edges are indexed by distinct group elements
    so a tree has exactly one more vertex than edges.
    """
    G = make_free_product(gamma, lam)
    if radius < 1:
        raise InvalidInput("radius must be >= 1")
    elems = G.ball(radius - 1, cap)
    labels = [coset_label(G, 0, G.identity)]
    index = {labels[0]: 0}
    edges = []
    for s in elems:
        ends = []
        for f in (0, 1):
            lab = coset_label(G, f, s)
            if lab not in index:
                index[lab] = len(labels)
                labels.append(lab)
            ends.append(index[lab])
        edges.append(tuple(sorted(ends)))
    if len(set(edges)) != len(edges):
        raise QTFError("two group elements gave the same edge")
    pg = build_pointed_graph(len(labels), edges, 0)
    if len(edges) != len(labels) - 1:
        raise QTFError("Bass-Serre ball is not a tree")
    return BassSerreBall(G, radius, pg, tuple(labels), index)


def check_left_action(bs: BassSerreBall, elements) -> list:
    """(g, edge) pairs where left multiplication by g fails to carry an edge to an edge.

    Also reports non-injective partial maps as (g, None).
    """
    edges = set(bs.pg.edges)
    bad = []
    for g in elements:
        image = [bs.act(g, v) for v in range(bs.pg.n)]
        defined = [i for i in image if i is not None]
        if len(set(defined)) != len(defined):
            bad.append((g, None))
        for u, v in bs.pg.edges:
            iu, iv = image[u], image[v]
            if iu is None or iv is None:
                continue
            if (min(iu, iv), max(iu, iv)) not in edges:
                bad.append((g, (u, v)))
    return bad


def interior_vertices(bs: BassSerreBall) -> list[int]:
    """Vertices wF all of whose edges wf (f in the factor F) lie in the ball.

    With w canonical, |wf| = |w| + |f|, so this is |w| + max|f| < radius; it
    does not look at the materialized degrees.
    """
    G = bs.group
    out = []
    for v, (f, w) in enumerate(bs.labels):
        F = G.factors[f]
        if F.order is None:
            continue
        reach = max(F.word_length(x) for x in F.elements())
        if G.word_length(w) + reach <= bs.radius - 1:
            out.append(v)
    return out
