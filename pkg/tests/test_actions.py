from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qtfree import actions as act
from qtfree.errors import InvalidInput, NotAutomorphism, NotReducedWord, OrbitEscapesBall
from qtfree.free_space import FreeVector, free_norm_dual, free_norm_flow, random_free_vector
from qtfree.graph_metric import cycle_graph, path_graph
from qtfree.groups import (bass_serre_ball, cayley_ball, cyclic_group, dihedral_infinite, make_coset_section,
                           make_free_group)
from qtfree.rng import XorShift64Star

F = Fraction


def z6_on_cycle():
    G = cyclic_group(6)
    pg = cycle_graph(6)
    vact = act.permutation_action(pg, G, {1: [(x + 1) % 6 for x in range(6)], 5: [(x - 1) % 6 for x in range(6)]})
    return G, pg, act.free_space_action(pg, G, vact)


def test_sparse_vector_arithmetic():
    v = act.SparseVector({0: 1, 1: F(-1, 2)}, 2)
    assert v.norm_power() == F(5, 4)
    assert (v - v) == act.SparseVector({}, 2)
    assert act.SparseVector({0: 3}, 1).norm() == 3
    with pytest.raises(InvalidInput):
        act.SparseVector({}, 0)
    with pytest.raises(InvalidInput):
        act.SparseVector({}, F(3, 2))


def test_free_space_action_on_cycle():
    G, pg, sigma = z6_on_cycle()
    assert not sigma.apply(G.identity, sigma.zero())
    assert sigma.orbit_norm_power(2) == 2
    for s in range(6):
        assert sigma.orbit_norm_power(s) == pg.d(s, 0)
    rng = XorShift64Star(1)
    for _ in range(30):
        s = rng.randbelow(6)
        mu = random_free_vector(rng, pg)
        assert free_norm_flow(sigma.apply_linear(s, mu), pg) == free_norm_flow(mu, pg)
    assert act.verify_cocycle(sigma, [(s, t) for s in range(6) for t in range(6)])["failures"] == []


def test_cocycle_consequences():
    G, pg, sigma = z6_on_cycle()
    for s in range(6):
        lhs = sigma.cocycle(G.inv(s))
        rhs = -sigma.apply_linear(G.inv(s), sigma.cocycle(s))
        assert lhs == rhs


def test_non_automorphism_rejected():
    G = cyclic_group(2)
    pg = path_graph(3)
    with pytest.raises(NotAutomorphism):
        act.permutation_action(pg, G, {1: [1, 0, 2]})
    with pytest.raises(NotAutomorphism):
        act.permutation_action(pg, G, {1: [0, 0, 2]})
    flip = act.permutation_action(pg, G, {1: [2, 1, 0]})
    assert flip(1, 0) == 2


def test_truncated_ball_guard():
    F2 = make_free_group(2)
    ball = cayley_ball(F2, 2)
    sigma = act.free_space_action(ball.pg, F2, act.cayley_vertex_action(ball))
    far = ball.index[(1, 1)]
    with pytest.raises(OrbitEscapesBall):
        sigma.apply_linear((1,), FreeVector.delta(far, 0))


def test_free_group_orbits_and_cocycle():
    F2 = make_free_group(2)
    ball = cayley_ball(F2, 5)
    sigma = act.free_space_action(ball.pg, F2, act.cayley_vertex_action(ball))
    short = F2.ball(2)
    for s in short:
        b = sigma.cocycle(s)
        assert free_norm_flow(b, ball.pg) == free_norm_dual(b, ball.pg) == len(s)
    three = [g for g in F2.ball(3)]
    pairs = [(s, t) for s in three for t in three if len(s) + len(t) <= 5]
    assert act.verify_cocycle(sigma, pairs)["failures"] == []
    rep = act.orbit_growth_report(sigma, F2, elements=short)
    assert rep["A"] == 1.0
    assert all(r["min_p"] == r["max_p"] == r["length"] for r in rep["table"])


def test_induced_action_on_dihedral():
    G, in_h, to_int = dihedral_infinite()
    sec = make_coset_section(G, in_h, 2)
    inner = act.translation_action(G, to_int, 2)
    tilde = act.induce_action(sec, inner)
    assert act.coset_distortion(sec) == 1
    elems = G.ball(8)
    assert act.verify_cocycle(tilde, [(s, t) for s in elems for t in elems])["failures"] == []
    for s in elems:
        assert tilde.orbit_norm_power(s) >= len(s) - 1
    for t in elems:
        if in_h(t):
            assert inner.orbit_norm_power(t) == len(t)


def test_index_one_induction_is_the_inner_action():
    Z = make_free_group(1)
    sec = make_coset_section(Z, lambda g: True, 1)
    inner = act.translation_action(Z, lambda g: sum(g), 1)
    tilde = act.induce_action(sec, inner)
    assert act.coset_distortion(sec) == 0
    for s in Z.ball(5):
        assert tilde.orbit_norm_power(s) == inner.orbit_norm_power(s) == len(s)


@pytest.mark.parametrize("p", [1, 2])
@pytest.mark.parametrize("orders", [(2, 3), (2, 2)])
def test_free_product_norm_identity(p, orders):
    A, B = cyclic_group(orders[0]), cyclic_group(orders[1])
    sa, sb = act.regular_action(A, p), act.regular_action(B, p)
    tree = bass_serre_ball(A, B, 8)
    tilde = act.free_product_action(sa, sb, p, tree)
    G = tilde.group
    for w in G.ball(8):
        assert tilde.orbit_norm_power(w) == act.letter_norm_sum(sa, sb, w) + 2 * len(w)
        if p == 1:
            assert tilde.orbit_norm_power(w) == 4 * len(w)


def test_free_product_word_at():
    A, B = cyclic_group(2), cyclic_group(3)
    tilde = act.free_product_action(act.regular_action(A), act.regular_action(B))
    assert tilde.orbit_norm_power(((0, 1), (1, 1))) == 8
    assert not tilde.cocycle(())
    with pytest.raises(NotReducedWord):
        tilde.cocycle(((1, 1), (1, 1)))


def test_free_product_with_bounded_nonisometric_factor_after_renorming():
    # the renormed Z/2 action is isometric, so it may feed the free product
    sw = act.renormed(act.swap_scale_representation())
    reg = act.regular_action(cyclic_group(3))
    tilde = act.free_product_action(sw, reg)
    for w in tilde.group.ball(5):
        assert tilde.orbit_norm_power(w) == act.letter_norm_sum(sw, reg, w) + 2 * len(w)


def test_direct_sum():
    Z = make_free_group(1)
    one = act.translation_action(Z, lambda g: sum(g), 2)
    two = act.direct_sum_action([one, one])
    for s in Z.ball(4):
        assert two.orbit_norm_power(s) == 4 * len(s)
    assert act.direct_sum_action([one]).orbit_norm_power((1, 1)) == one.orbit_norm_power((1, 1))
    els = Z.ball(3)
    assert act.verify_cocycle(two, [(s, t) for s in els for t in els])["failures"] == []


def test_direct_sum_mixed_vector_types():
    F2 = make_free_group(2)
    ball = cayley_ball(F2, 4)
    fs = act.free_space_action(ball.pg, F2, act.cayley_vertex_action(ball))
    reg = act.regular_action(F2)
    total = act.direct_sum_action([fs, reg])
    for s in F2.ball(2):
        assert total.orbit_norm_power(s) == fs.orbit_norm_power(s) + reg.orbit_norm_power(s)


def test_swap_scale_and_renorming():
    sw = act.swap_scale_representation()
    assert sw.apply_linear(1, sw.apply_linear(1, act.SparseVector({0: 1, 1: 3}))) == act.SparseVector({0: 1, 1: 3})
    v = act.SparseVector({0: 1, 1: 3})
    assert act.renorm_sup(sw, v) == max(v.norm_power(), sw.apply_linear(1, v).norm_power())
    assert act.renorm_sup(sw, act.SparseVector({})) == 0
    iso = act.regular_action(cyclic_group(3))
    w = act.SparseVector({1: 2, 2: -1})
    assert act.renorm_sup(iso, w) == w.norm_power()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32))
def test_renormed_is_isometric_and_equivalent(seed):
    rng = XorShift64Star(seed)
    sw = act.swap_scale_representation()
    ren = act.renormed(sw)
    v = act.SparseVector({0: rng.fraction(), 1: rng.fraction()})
    for s in sw.group.elements():
        assert ren.norm_power(sw.apply_linear(s, v)) == ren.norm_power(v)
    assert v.norm_power() <= ren.norm_power(v) <= sw.lipschitz_bound * v.norm_power()


def test_lipschitz_check_sees_the_bound():
    sw = act.swap_scale_representation()
    res = act.verify_lipschitz(sw, [(1, act.SparseVector({0: 1}))])
    assert res["max_ratio_p"] == 2 and res["failures"] == []
    rep = act.verify_representation(sw, [(1, 1, act.SparseVector({0: 1, 1: 1}))])
    assert rep["failures"] == []


def test_trivial_action_is_flagged():
    F2 = make_free_group(2)
    rep = act.orbit_growth_report(act.trivial_action(F2), F2, radius=2)
    assert rep["A"] is None and not rep["proper_evidence"]


def test_word_of():
    F2 = make_free_group(2)
    assert act.word_of(F2, (1, -2)) == [(1,), (-2,)]
    G = cyclic_group(6)
    w = act.word_of(G, 3)
    assert len(w) == 3 and G.prod(*w) == 3
