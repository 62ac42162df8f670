from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from qtfree.errors import InvalidInput
from qtfree.free_space import (FreeVector, LipFunction, as_fraction, check_pushforward_contraction,
                               decomposition_ratio, free_norm_dual, free_norm_flow, free_norm_metric,
                               ker_dual_bounds, lift, lip_norm, lip_norm_all_pairs,
                               parse_free_vector, projection_P, pushforward, random_free_vector,
                               random_kernel_function, solve_dual)
from qtfree.graph_metric import cycle_graph, grid_graph, path_graph, star_graph
from qtfree.kerr_tree import build_quotient, delta_eff, delta_star, realize_tree, right_inverse_h
from qtfree.rng import XorShift64Star, random_connected_graph, random_tree

F = Fraction


def vec(pg, **kw):
    return FreeVector({int(k[1:]): F(v) for k, v in kw.items()}, pg.basepoint)


def test_vector_canonical_form():
    v = FreeVector({0: 3, 1: 0, 2: F(1, 2)}, 0)
    assert v.coeffs == {2: F(1, 2)}
    assert v - v == FreeVector.zero(0)
    assert 2 * v == FreeVector({2: 1}, 0)


def test_as_fraction():
    assert as_fraction("3/4") == F(3, 4)
    assert as_fraction(2) == 2
    for bad in (0.5, True, "x", "1/0", None):
        with pytest.raises(InvalidInput):
            as_fraction(bad)


def test_parse_vector_drops_basepoint():
    pg = path_graph(3)
    mu, warnings = parse_free_vector({"coeffs": {"0": "5", "2": "1/2"}}, pg)
    assert mu.coeffs == {2: F(1, 2)} and len(warnings) == 1
    for bad in ({}, {"coeffs": {"x": "1"}}, {"coeffs": {"7": "1"}}, {"coeffs": {"1": 0.5}}):
        with pytest.raises(InvalidInput):
            parse_free_vector(bad, pg)


def test_lip_norm_examples():
    pg = path_graph(3)
    assert lip_norm(LipFunction.from_values([0, 1, 3], 0), pg) == 2
    assert lip_norm(LipFunction.from_values([0, 0, 0], 0), pg) == 0
    g = grid_graph(3, 3)
    dist_fn = LipFunction.from_values([int(x) for x in g.depth], 0)
    assert lip_norm(dist_fn, g) == 1


def test_lip_function_must_vanish_at_basepoint():
    with pytest.raises(InvalidInput):
        LipFunction.from_values([1, 0], 0)


def test_star_example():
    pg = star_graph(3)
    mu = FreeVector({1: 1, 2: 1, 3: -2}, 0)
    assert free_norm_dual(mu, pg) == free_norm_flow(mu, pg) == 4


def test_path_positive_masses():
    pg = path_graph(3)
    assert free_norm_flow(FreeVector({1: 1, 2: 1}, 0), pg) == 3
    assert free_norm_dual(FreeVector({2: F(-5, 3)}, 0), pg) == F(10, 3)


def test_dual_certificate_is_optimal_and_feasible():
    rng = XorShift64Star(3)
    for _ in range(20):
        pg = random_connected_graph(rng, rng.randint(2, 15), extra_edge_prob=0.3)
        mu = random_free_vector(rng, pg)
        value, f = solve_dual(mu, pg)
        assert f(pg.basepoint) == 0
        assert lip_norm(f, pg) <= 1
        assert f.pair(mu) == value


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 20))
def test_duality_and_scipy_oracle(seed, n):
    rng = XorShift64Star(seed)
    pg = random_connected_graph(rng, n, extra_edge_prob=0.2, basepoint=rng.randbelow(n))
    mu = random_free_vector(rng, pg)
    dual, flow = free_norm_dual(mu, pg), free_norm_flow(mu, pg)
    assert dual == flow
    assert abs(float(flow) - oracles.lp_free_norm(pg, mu.coeffs)) < 1e-7


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 25))
def test_tree_norm_matches_cut_formula(seed, n):
    rng = XorShift64Star(seed)
    pg = random_tree(rng, n)
    mu = random_free_vector(rng, pg)
    assert free_norm_flow(mu, pg) == free_norm_dual(mu, pg) == oracles.tree_free_norm(pg, mu.coeffs)


def test_isometric_embedding_of_points():
    pg = grid_graph(3, 3, basepoint=4)
    for x in range(pg.n):
        for y in range(pg.n):
            mu = FreeVector.delta(x, 4) - FreeVector.delta(y, 4)
            assert free_norm_dual(mu, pg) == free_norm_flow(mu, pg) == pg.d(x, y)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_norm_axioms(seed):
    rng = XorShift64Star(seed)
    pg = random_connected_graph(rng, rng.randint(2, 15))
    a, b = random_free_vector(rng, pg), random_free_vector(rng, pg)
    c = rng.fraction()
    na, nb = free_norm_flow(a, pg), free_norm_flow(b, pg)
    assert free_norm_flow(a + b, pg) <= na + nb
    assert free_norm_flow(a * c, pg) == abs(c) * na
    assert free_norm_flow(-a, pg) == na


def test_lip_norm_edges_equal_all_pairs():
    rng = XorShift64Star(9)
    for _ in range(15):
        pg = random_connected_graph(rng, rng.randint(2, 10), extra_edge_prob=0.3)
        f = LipFunction.from_values([F(0)] + [rng.fraction() for _ in range(pg.n - 1)], 0)
        assert lip_norm(f, pg) == lip_norm_all_pairs(f, pg)


def test_pushforward_and_projection_on_cycle4():
    pg = cycle_graph(4)
    qm = build_quotient(pg)
    h = right_inverse_h(qm)
    c13 = qm.class_of[1]
    assert pushforward(qm, FreeVector({1: 1, 3: -1}, 0)) == FreeVector.zero(qm.base_class)
    assert pushforward(qm, FreeVector({1: 1, 3: 1}, 0)) == FreeVector({c13: 2}, qm.base_class)
    assert projection_P(qm, h, FreeVector.delta(3, 0)) == FreeVector.delta(1, 0)
    assert projection_P(qm, h, FreeVector({3: 1, 1: -1}, 0)) == FreeVector.zero(0)
    on_image = FreeVector({1: 2, 2: -1}, 0)
    assert projection_P(qm, h, on_image) == on_image
    assert lift(h, pushforward(qm, on_image), 0) == on_image


def test_kernel_bounds_cycle4_example():
    pg = cycle_graph(4)
    qm = build_quotient(pg)
    f = LipFunction.from_values([0, 0, 0, 7], 0)
    b = ker_dual_bounds(f, pg, qm)
    assert (b.sup_norm, b.lip, b.ratio, b.upper) == (7, 7, 1, 2)
    assert delta_eff(pg, qm) == 2
    with pytest.raises(InvalidInput):
        ker_dual_bounds(LipFunction.from_values([0, 1, 0, 0], 0), pg, qm)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 20))
def test_quotient_maps_on_random_graphs(seed, n):
    rng = XorShift64Star(seed)
    pg = random_connected_graph(rng, n, extra_edge_prob=0.3)
    qm = build_quotient(pg)
    tr = realize_tree(qm)
    h = right_inverse_h(qm)
    mu = random_free_vector(rng, pg)
    ny, nx = check_pushforward_contraction(mu, pg, qm, tr)
    assert ny == free_norm_metric(pushforward(qm, mu), qm.dist_Y, qm.base_class)
    P = projection_P(qm, h, mu)
    assert projection_P(qm, h, P) == P
    if mu:
        # ||Pμ|| <= (1 + Δ*)||φ_g μ|| and ||φ_g μ|| <= ||μ|| bound the ratio on both sides
        r = decomposition_ratio(mu, pg, qm, tr, h)
        dstar = delta_star(pg, qm)
        assert F(1, 1 + dstar) <= r <= 3 + dstar
    f = random_kernel_function(rng, pg, qm, h)
    if f is not None:
        b = ker_dual_bounds(f, pg, qm, h)
        assert b.lip / 2 <= b.sup_norm <= b.upper * b.lip
