"""Affine actions σ(s)v = π(s)v + b(s) on finitely supported coefficient spaces.

Norms are handled through p-th powers so every comparison stays rational;
only integer exponents p >= 1 are supported.  Vectors of the free-space
action are :class:`~qtfree.free_space.FreeVector`; everything else uses
:class:`SparseVector`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from .errors import InvalidInput, NotAutomorphism, NotReducedWord, OrbitEscapesBall, QTFError
from .free_space import FreeVector, free_norm_flow
from .graph_metric import PointedGraph
from .groups import BassSerreBall, CayleyBall, CosetSection, Group, alpha, coset_label, make_free_product


def _check_p(p):
    if not isinstance(p, int) or isinstance(p, bool) or p < 1:
        raise InvalidInput(f"exponent p must be an integer >= 1, got {p!r}")
    return p


class SparseVector:
    """Finitely supported map index -> rational, with an ℓᵖ exponent."""

    __slots__ = ("coeffs", "p")

    def __init__(self, coeffs=None, p: int = 1):
        self.p = _check_p(p)
        self.coeffs = {k: Fraction(v) for k, v in (coeffs or {}).items() if v != 0}

    def _combine(self, other, sign):
        if not isinstance(other, SparseVector):
            return NotImplemented
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + sign * v
        return SparseVector(out, self.p)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return SparseVector({k: -v for k, v in self.coeffs.items()}, self.p)

    def __mul__(self, scalar):
        return SparseVector({k: v * scalar for k, v in self.coeffs.items()}, self.p)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, SparseVector) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        return f"SparseVector({self.coeffs}, p={self.p})"

    def norm_power(self) -> Fraction:
        """Σ |v_i|^p."""
        return sum((abs(v) ** self.p for v in self.coeffs.values()), Fraction(0))

    def norm(self) -> float:
        return p_root(self.norm_power(), self.p)


def p_root(value: Fraction, p: int):
    """Exact for p = 1, float otherwise (display only)."""
    return value if p == 1 else float(value) ** (1.0 / p)


@dataclass(frozen=True)
class AffineAction:
    """π, b and the norm on the coefficient space, for one group.

    ``norm_power(v)`` returns ||v||^p.  ``make_vector(coeffs)`` builds a
    vector of the right type from a coefficient dict.
    """

    group: Group
    apply_linear: Callable[[Any, Any], Any]
    cocycle: Callable[[Any], Any]
    norm_power: Callable[[Any], Fraction]
    make_vector: Callable[[dict], Any]
    p: int = 1
    lipschitz_bound: Fraction = Fraction(1)
    name: str = "action"

    def zero(self):
        return self.make_vector({})

    def apply(self, s, v):
        return self.apply_linear(s, v) + self.cocycle(s)

    def orbit_norm_power(self, s) -> Fraction:
        """||σ(s)0||^p."""
        return self.norm_power(self.cocycle(s))


def lp_norm_power(p):
    return lambda v: v.norm_power()


def lp_factory(p):
    return lambda coeffs: SparseVector(coeffs, p)


# ---------------------------------------------------------------------------
# verification helpers


def verify_cocycle(action: AffineAction, pairs) -> dict:
    """Exact check of b(st) = π(s)b(t) + b(s) on the given pairs."""
    G = action.group
    failures = []
    n = 0
    for s, t in pairs:
        n += 1
        lhs = action.cocycle(G.mul(s, t))
        rhs = action.apply_linear(s, action.cocycle(t)) + action.cocycle(s)
        if lhs != rhs:
            failures.append({"s": G.format(s), "t": G.format(t)})
    if action.cocycle(G.identity):
        failures.append({"s": "e", "t": None, "reason": "b(e) != 0"})
    return {"checked": n, "failures": failures}


def verify_representation(action: AffineAction, triples) -> dict:
    """π(e)v = v and π(st)v = π(s)π(t)v on (s, t, v) samples."""
    G = action.group
    failures = []
    n = 0
    for s, t, v in triples:
        n += 1
        if action.apply_linear(G.identity, v) != v:
            failures.append({"s": "e", "reason": "π(e) != id"})
        if action.apply_linear(G.mul(s, t), v) != action.apply_linear(s, action.apply_linear(t, v)):
            failures.append({"s": G.format(s), "t": G.format(t)})
    return {"checked": n, "failures": failures}


def verify_lipschitz(action: AffineAction, samples) -> dict:
    """||π(s)v||^p <= C^p ||v||^p on (s, v) samples; reports the largest ratio seen."""
    C = Fraction(action.lipschitz_bound) ** action.p
    worst = Fraction(0)
    failures = []
    for s, v in samples:
        nv = action.norm_power(v)
        if nv == 0:
            continue
        ratio = action.norm_power(action.apply_linear(s, v)) / nv
        worst = max(worst, ratio)
        if ratio > C:
            failures.append({"s": action.group.format(s), "ratio_p": str(ratio)})
    return {"checked": len(samples), "max_ratio_p": worst, "failures": failures}


# ---------------------------------------------------------------------------
# actions on Lipschitz-free spaces


def cayley_vertex_action(ball: CayleyBall):
    """Left multiplication on the vertices of a Cayley ball (partial near the boundary)."""
    G = ball.group
    return lambda s, v: ball.index.get(G.mul(s, ball.elements[v]))


def word_of(G: Group, g) -> list:
    """A geodesic word in the generators for g (shortlex-first)."""
    prev = {G.identity: None}
    frontier = [G.identity]
    while g not in prev:
        nxt = []
        for h in frontier:
            for s in G.generators:
                k = G.mul(h, s)
                if k not in prev:
                    prev[k] = (h, s)
                    nxt.append(k)
        if not nxt:
            raise QTFError(f"{G.format(g)} is not generated")
        frontier = nxt
    word = []
    while prev[g] is not None:
        g, s = prev[g]
        word.append(s)
    return word[::-1]


def permutation_action(pg: PointedGraph, G: Group, perms: dict):
    """Vertex action given by one graph automorphism per generator.

    Each permutation is checked to be an edge-preserving bijection; a group
    element acts through a geodesic word.
    """
    edges = set(pg.edges)
    for s, perm in perms.items():
        perm = list(perm)
        if sorted(perm) != list(range(pg.n)):
            raise NotAutomorphism(f"generator {G.format(s)}: not a permutation of the vertices")
        for u, v in pg.edges:
            a, b = perm[u], perm[v]
            if (min(a, b), max(a, b)) not in edges:
                raise NotAutomorphism(f"generator {G.format(s)} maps edge {(u, v)} to a non-edge")
    missing = [s for s in G.generators if s not in perms]
    if missing:
        raise InvalidInput(f"no permutation for generators {[G.format(s) for s in missing]}")
    cache = {}

    def act(s, v):
        if s not in cache:
            table = list(range(pg.n))
            for letter in reversed(word_of(G, s)):
                table = [perms[letter][x] for x in table]
            cache[s] = table
        return cache[s][v]

    return act


def free_space_action(pg: PointedGraph, G: Group, act, norm=free_norm_flow, name="free-space") -> AffineAction:
    """π(s)δ_x = δ_{s·x} - δ_{s·o},  b(s) = δ_{s·o}.

    ``act(s, v)`` returns the vertex s·v or None when undefined (truncated
    ball); applying the action to such a vertex raises OrbitEscapesBall.
    """
    o = pg.basepoint

    def move(s, v):
        w = act(s, v)
        if w is None:
            raise OrbitEscapesBall(f"{G.format(s)} moves vertex {v} outside the ball")
        return w

    def apply_linear(s, mu: FreeVector):
        so = move(s, o)
        out: dict[int, Fraction] = {}
        for x, c in mu.coeffs.items():
            sx = move(s, x)
            out[sx] = out.get(sx, 0) + c
            out[so] = out.get(so, 0) - c
        return FreeVector(out, o)

    def cocycle(s):
        return FreeVector.delta(move(s, o), o)

    return AffineAction(G, apply_linear, cocycle, lambda mu: norm(mu, pg),
                        lambda coeffs: FreeVector(coeffs, o), 1, Fraction(1), name)


# ---------------------------------------------------------------------------
# ℓᵖ model actions


def regular_action(G: Group, p: int = 1) -> AffineAction:
    """Left regular representation on ℓᵖ(G) with b(s) = δ_s - δ_e."""
    p = _check_p(p)

    def apply_linear(s, v):
        return SparseVector({G.mul(s, g): c for g, c in v.coeffs.items()}, p)

    def cocycle(s):
        return SparseVector({s: 1, G.identity: -1} if s != G.identity else {}, p)

    return AffineAction(G, apply_linear, cocycle, lp_norm_power(p), lp_factory(p), p, Fraction(1),
                        f"regular({G.name})")


def translation_action(G: Group, to_int, scale=1, p: int = 1) -> AffineAction:
    """Action of a group isomorphic to Z by translation on ℓᵖ(Z).

    ``to_int`` is the isomorphism; b(n) is ``scale`` times the indicator of
    [0, n) (negated on [n, 0) for n < 0), so ||b(n)||_1 = scale·|n|.
    """
    p = _check_p(p)
    scale = Fraction(scale)

    def apply_linear(s, v):
        n = to_int(s)
        return SparseVector({k + n: c for k, c in v.coeffs.items()}, p)

    def cocycle(s):
        n = to_int(s)
        if n >= 0:
            return SparseVector({k: scale for k in range(n)}, p)
        return SparseVector({k: -scale for k in range(n, 0)}, p)

    return AffineAction(G, apply_linear, cocycle, lp_norm_power(p), lp_factory(p), p, Fraction(1),
                        f"translation(x{scale})")


def trivial_action(G: Group, p: int = 1) -> AffineAction:
    return AffineAction(G, lambda s, v: v, lambda s: SparseVector({}, p), lp_norm_power(p), lp_factory(p), p,
                        Fraction(1), "trivial")


def swap_scale_representation(p: int = 1) -> AffineAction:
    """Z/2 on ℓᵖ({0, 1}) by (x0, x1) -> (x1/2, 2 x0): bounded, not isometric (C = 2)."""
    from .groups import cyclic_group

    G = cyclic_group(2)

    def apply_linear(s, v):
        if s == G.identity:
            return v
        x0, x1 = v.coeffs.get(0, 0), v.coeffs.get(1, 0)
        return SparseVector({0: Fraction(x1) / 2, 1: 2 * Fraction(x0)}, p)

    return AffineAction(G, apply_linear, lambda s: SparseVector({}, p), lp_norm_power(p), lp_factory(p), p,
                        Fraction(2), "swap-scale")


# ---------------------------------------------------------------------------
# induction from a finite-index subgroup


def induce_action(section: CosetSection, inner: AffineAction) -> AffineAction:
    """Induced action on ℓᵖ(G/H; inner space), indices (coset rep, inner index).

        (π̃(s)f)(s x) = π(α(s, x)) f(x),    b̃(s)(s x) = b(α(s, x)).

    ``inner`` must be an action of H whose elements are given as elements of G.
    """
    G = section.group
    p = inner.p

    def split(f):
        fibers: dict[Any, dict] = {}
        for (x, i), c in f.coeffs.items():
            fibers.setdefault(x, {})[i] = c
        return fibers

    def apply_linear(s, f):
        out = {}
        for x, coeffs in split(f).items():
            moved = inner.apply_linear(alpha(section, s, x), inner.make_vector(coeffs))
            sx = section.act(s, x)
            for i, c in moved.coeffs.items():
                out[(sx, i)] = c
        return SparseVector(out, p)

    def cocycle(s):
        out = {}
        for x in section.reps:
            b = inner.cocycle(alpha(section, s, x))
            sx = section.act(s, x)
            for i, c in b.coeffs.items():
                out[(sx, i)] = c
        return SparseVector(out, p)

    def norm_power(f):
        return sum((inner.norm_power(inner.make_vector(c)) for c in split(f).values()), Fraction(0))

    return AffineAction(G, apply_linear, cocycle, norm_power, lp_factory(p), p, inner.lipschitz_bound,
                        f"induced({inner.name})")


def coset_distortion(section: CosetSection) -> int:
    """D = max |ω^{-1}| over the representatives."""
    G = section.group
    return max(G.word_length(G.inv(w)) for w in section.reps)


# ---------------------------------------------------------------------------
# free products acting over the Bass-Serre tree

E_SLOT, F_SLOT, REG_GAMMA, REG_LAMBDA = 0, 1, 2, 3


def free_product_action(sigma_gamma: AffineAction, sigma_lambda: AffineAction, p: int = 1,
                        tree: BassSerreBall | None = None) -> AffineAction:
    """Isometric action of Γ∗Λ on ℓᵖ(T; E ⊕ F ⊕ ℓᵖ(Γ) ⊕ ℓᵖ(Λ)).

    Indices are (tree vertex, slot, inner index).  The fiber representation
    sends a letter γ of Γ to σ_Γ's π(γ) on E and left translation on ℓᵖ(Γ),
    identity elsewhere (likewise for Λ); π̃(y)f(x) = π(y) f(y⁻¹x).  The
    cocycle follows b̃(s y) = π̃(s) b̃(y) + b̃(s) with the one-letter base cases
    supported at the vertices Γ and Λ.  Only the tree vertices carrying mass
    are stored.  With ``tree`` given, any support outside it raises
    OrbitEscapesBall.
    """
    p = _check_p(p)
    if sigma_gamma.p != p or sigma_lambda.p != p:
        raise InvalidInput("factor actions must use the same exponent p")
    gamma, lam = sigma_gamma.group, sigma_lambda.group
    G = tree.group if tree is not None else make_free_product(gamma, lam)
    factors = (sigma_gamma, sigma_lambda)

    def vertex(label):
        if tree is not None and label not in tree.index:
            raise OrbitEscapesBall(f"tree vertex {label} outside the Bass-Serre ball")
        return label

    def fiber_letter(letter, fiber: dict) -> dict:
        f, g = letter
        act = factors[f]
        own, reg = (E_SLOT, REG_GAMMA) if f == 0 else (F_SLOT, REG_LAMBDA)
        out = {}
        sub = {i: c for (slot, i), c in fiber.items() if slot == own}
        if sub:
            for i, c in act.apply_linear(g, act.make_vector(sub)).coeffs.items():
                out[(own, i)] = c
        F = G.factors[f]
        for (slot, i), c in fiber.items():
            if slot == reg:
                out[(slot, F.mul(g, i))] = c
            elif slot != own:
                out[(slot, i)] = c
        return out

    def split(v):
        fibers: dict[Any, dict] = {}
        for (x, slot, i), c in v.coeffs.items():
            fibers.setdefault(x, {})[(slot, i)] = c
        return fibers

    def apply_linear(y, v):
        if not G.is_reduced(y):
            raise NotReducedWord(f"{y!r} is not a reduced word")
        out = {}
        for (f, w), fiber in split(v).items():
            for letter in reversed(y):
                fiber = fiber_letter(letter, fiber)
            x = vertex(coset_label(G, f, G.mul(y, w)))
            for (slot, i), c in fiber.items():
                out[(x, slot, i)] = c
        return SparseVector(out, p)

    def letter_cocycle(letter):
        f, g = letter
        act = factors[f]
        F = G.factors[f]
        own, reg = (E_SLOT, REG_GAMMA) if f == 0 else (F_SLOT, REG_LAMBDA)
        x = vertex(coset_label(G, f, G.identity))
        out = {(x, own, i): c for i, c in act.cocycle(g).coeffs.items()}
        out[(x, reg, g)] = Fraction(1)
        out[(x, reg, F.identity)] = Fraction(-1)
        return SparseVector(out, p)

    def cocycle(y):
        if not G.is_reduced(y):
            raise NotReducedWord(f"{y!r} is not a reduced word")
        acc = SparseVector({}, p)
        for k in range(len(y) - 1, -1, -1):
            letter = y[k]
            acc = apply_linear((letter,), acc) + letter_cocycle(letter)
        return acc

    def norm_power(v):
        total = Fraction(0)
        for fiber in split(v).values():
            for slot, act in ((E_SLOT, sigma_gamma), (F_SLOT, sigma_lambda)):
                sub = {i: c for (s, i), c in fiber.items() if s == slot}
                if sub:
                    total += act.norm_power(act.make_vector(sub))
            total += sum((abs(c) ** p for (s, _), c in fiber.items() if s in (REG_GAMMA, REG_LAMBDA)),
                         Fraction(0))
        return total

    return AffineAction(G, apply_linear, cocycle, norm_power, lp_factory(p), p, Fraction(1),
                        f"free-product({sigma_gamma.name}, {sigma_lambda.name})")


def letter_norm_sum(action_gamma: AffineAction, action_lambda: AffineAction, word) -> Fraction:
    """Σ ||b(s_i)||^p over the letters of a reduced word."""
    acts = (action_gamma, action_lambda)
    return sum((acts[f].orbit_norm_power(g) for f, g in word), Fraction(0))


# ---------------------------------------------------------------------------
# direct sums and renorming


def direct_sum_action(actions: list[AffineAction]) -> AffineAction:
    """Componentwise action on the ℓ¹ sum; indices are (component, inner index)."""
    if not actions:
        raise InvalidInput("need at least one action")
    G = actions[0].group
    if any(a.p != 1 for a in actions):
        raise InvalidInput("direct sums are formed with p = 1")

    def parts(v):
        comps = [{} for _ in actions]
        for (k, i), c in v.coeffs.items():
            comps[k][i] = c
        return [a.make_vector(c) for a, c in zip(actions, comps)]

    def join(vectors):
        return SparseVector({(k, i): c for k, w in enumerate(vectors) for i, c in w.coeffs.items()}, 1)

    def apply_linear(s, v):
        return join([a.apply_linear(s, w) for a, w in zip(actions, parts(v))])

    def cocycle(s):
        return join([a.cocycle(s) for a in actions])

    def norm_power(v):
        return sum((a.norm_power(w) for a, w in zip(actions, parts(v))), Fraction(0))

    bound = max(Fraction(a.lipschitz_bound) for a in actions)
    return AffineAction(G, apply_linear, cocycle, norm_power, lp_factory(1), 1, bound,
                        "+".join(a.name for a in actions))


def renorm_sup(action: AffineAction, v) -> Fraction:
    """max_s ||π(s)v||^p over a finite group (the renormed norm, p-th power)."""
    return max(action.norm_power(action.apply_linear(s, v)) for s in action.group.elements())


def renormed(action: AffineAction) -> AffineAction:
    """Same π and b, measured in the sup-over-orbit norm; isometric by construction."""
    return AffineAction(action.group, action.apply_linear, action.cocycle,
                        lambda v: renorm_sup(action, v), action.make_vector, action.p, Fraction(1),
                        f"renormed({action.name})")


# ---------------------------------------------------------------------------
# orbit growth


def orbit_growth_report(action: AffineAction, G: Group | None = None, radius: int = 4,
                        elements=None) -> dict:
    """Per word length, the extremes of ||σ(s)0||^p, and the least A >= 1 with
    ||σ(s)0|| >= |s|/A - A over the tested elements.

    Finite-ball evidence only.  A is reported as None (and the action flagged
    non-proper) when every nontrivial element has a zero orbit norm.
    """
    G = action.group if G is None else G
    elems = G.ball(radius) if elements is None else elements
    rows: dict[int, list] = {}
    need = 1.0
    nonzero = False
    for s in elems:
        L = G.word_length(s)
        npow = action.orbit_norm_power(s)
        rows.setdefault(L, []).append(npow)
        if L > 0 and npow > 0:
            nonzero = True
        nrm = float(p_root(npow, action.p))
        # smallest A with A^2 + nrm·A - L >= 0
        need = max(need, (-nrm + math.sqrt(nrm * nrm + 4 * L)) / 2)
    table = [{"length": L, "count": len(v), "min_p": min(v), "max_p": max(v)} for L, v in sorted(rows.items())]
    proper = nonzero and all(r["min_p"] > 0 for r in table if r["length"] > 0)
    return {
        "p": action.p,
        "table": table,
        "A": need if nonzero else None,
        "proper_evidence": proper,
        "label": "finite-ball evidence, not a proof",
    }
