"""Seeded xorshift64* generator and the random corpora built from it.

Reports must be byte-identical across runs and platforms for a given seed, so
sampling goes through this small generator rather than ``random``/numpy,
whose streams are not guaranteed stable across versions.
"""
from __future__ import annotations

from fractions import Fraction

from .graph_metric import PointedGraph, build_pointed_graph

_MASK = (1 << 64) - 1


class XorShift64Star:
    """Marsaglia xorshift with the 2685821657736338717 output multiplier."""

    def __init__(self, seed: int):
        # splitmix64 scrambles the seed so that small seeds are not degenerate
        z = (seed + 0x9E3779B97F4A7C15) & _MASK
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        self.state = (z ^ (z >> 31)) or 1

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK
        x ^= x >> 27
        self.state = x
        return (x * 2685821657736338717) & _MASK

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        # rejection sampling keeps the result unbiased
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.randbelow(hi - lo + 1)

    def random(self) -> float:
        return (self.next_u64() >> 11) / float(1 << 53)

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]

    def sample(self, seq, k):
        pool = list(seq)
        out = []
        for _ in range(min(k, len(pool))):
            out.append(pool.pop(self.randbelow(len(pool))))
        return out

    def shuffle(self, seq) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def fraction(self, max_num: int = 5, max_den: int = 4) -> Fraction:
        """Nonzero rational with bounded numerator and denominator."""
        num = self.randint(1, max_num) * (1 if self.randbelow(2) else -1)
        return Fraction(num, self.randint(1, max_den))


def random_tree(rng: XorShift64Star, n: int, basepoint: int | None = None) -> PointedGraph:
    """Random recursive tree on n vertices (vertex i attaches to a uniform j < i)."""
    edges = [(rng.randbelow(i), i) for i in range(1, n)]
    perm = list(range(n))
    rng.shuffle(perm)
    edges = [(perm[u], perm[v]) for u, v in edges]
    bp = rng.randbelow(n) if basepoint is None else basepoint
    return build_pointed_graph(n, edges, bp)


def random_connected_graph(rng: XorShift64Star, n: int, extra_edge_prob: float = 0.15,
                           basepoint: int | None = None) -> PointedGraph:
    """Random spanning tree plus each remaining pair independently with the given probability."""
    tree = random_tree(rng, n, basepoint=0)
    edges = set(tree.edges)
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < extra_edge_prob:
                edges.add((u, v))
    bp = rng.randbelow(n) if basepoint is None else basepoint
    return build_pointed_graph(n, sorted(edges), bp)
