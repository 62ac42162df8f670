import pytest
from hypothesis import given, settings, strategies as st

from qtfree.errors import BallTooLarge, InvalidInput, NotAGroup
from qtfree.graph_metric import is_tree
from qtfree.groups import (alpha, bass_serre_ball, cayley_ball, check_alpha_chain_rule, check_coset_decomposition,
                           check_left_action, cyclic_group, dihedral_infinite, interior_vertices,
                           make_coset_section, make_direct_product, make_finite_group, make_free_group,
                           make_free_product, parse_group)
from qtfree.rng import XorShift64Star


def test_finite_groups():
    z2 = cyclic_group(2)
    assert z2.word_length(1) == 1
    z3 = cyclic_group(3)
    assert sorted(z3.ball(1)) == [0, 1, 2]


@pytest.mark.parametrize("table, axiom", [
    ([[0, 1], [1, 1]], "inverses"),
    ([[0, 1], [1, 2]], "closure"),
    ([[1, 0], [0, 0]], "identity"),
    ([[0, 1, 2], [1, 0, 0], [2, 0, 0]], None),
])
def test_not_a_group(table, axiom):
    with pytest.raises(NotAGroup) as exc:
        make_finite_group(table)
    if axiom:
        assert exc.value.axiom == axiom


def test_nonassociative_loop_rejected():
    # a Latin square with identity 0 and inverses, but not associative
    table = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(NotAGroup) as exc:
        make_finite_group(table)
    assert exc.value.axiom == "associativity"


def test_free_group_reduction():
    F2 = make_free_group(2)
    a, A = (1,), (-1,)
    assert F2.mul(a, A) == F2.identity
    assert F2.mul((1, 2), (-2, -1, 2)) == (2,)


def test_free_product_normal_forms():
    G = make_free_product(cyclic_group(2), cyclic_group(2))
    ab = ((0, 1), (1, 1))
    x = G.identity
    for n in range(1, 6):
        x = G.mul(x, ab)
        assert G.word_length(x) == 2 * n
    H = make_free_product(cyclic_group(2), cyclic_group(3))
    w = H.prod(((0, 1),), ((1, 1),), ((0, 1),), ((1, 2),))
    assert H.is_reduced(w) and H.word_length(w) == 4
    assert H.mul(((1, 1),), ((1, 2),)) == H.identity
    assert not H.is_reduced(((1, 1), (1, 1)))


def test_parse_group():
    assert parse_group("free:2").rank == 2
    assert parse_group("z").rank == 1
    assert parse_group("cyclic:6").order == 6
    assert parse_group(" product( cyclic:2 , cyclic:3 ) ").factors[1].order == 3
    assert parse_group("direct(cyclic:2,cyclic:3)").order == 6
    for bad in ("", "free", "free:x", "cyclic:2)", "product(z)", "nonsense"):
        with pytest.raises(InvalidInput):
            parse_group(bad)


def test_cayley_balls():
    F2 = make_free_group(2)
    b = cayley_ball(F2, 2)
    assert b.pg.n == 17 and is_tree(b.pg)
    z = cayley_ball(make_free_group(1), 3)
    assert z.pg.n == 7 and is_tree(z.pg)
    c6 = cayley_ball(cyclic_group(6), 3)
    assert c6.pg.n == 6 and len(c6.pg.edges) == 6
    with pytest.raises(BallTooLarge):
        cayley_ball(F2, 8, cap=1000)


def test_cap_from_environment(monkeypatch):
    monkeypatch.setenv("QTF_CAP", "10")
    with pytest.raises(BallTooLarge):
        make_free_group(2).ball(2)
    monkeypatch.setenv("QTF_CAP", "zero")
    with pytest.raises(InvalidInput):
        make_free_group(2).ball(1)


@pytest.mark.parametrize("spec", ["free:2", "product(cyclic:2,cyclic:3)", "direct(z,cyclic:3)", "cyclic:7"])
def test_ball_and_word_length(spec):
    G = parse_group(spec)
    ball = cayley_ball(G, 4)
    small = [g for g in ball.elements if G.word_length(g) <= 2]
    for g in ball.elements:
        assert ball.pg.d(0, ball.index[g]) == G.word_length(g)
    for s in small:
        for t in small:
            assert G.word_length(G.mul(s, t)) <= G.word_length(s) + G.word_length(t)
    assert set(G.ball(2)) <= set(G.ball(3))
    assert G.word_length(G.identity) == 0
    assert set(G.generators) == {G.inv(s) for s in G.generators}


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32))
def test_free_product_round_trip(seed):
    rng = XorShift64Star(seed)
    G = make_free_product(cyclic_group(2), cyclic_group(3))
    gens = list(G.generators)
    word = [rng.choice(gens) for _ in range(rng.randint(0, 12))]
    g = G.prod(*word)
    assert G.is_reduced(g)
    assert G.mul(g, G.inv(g)) == G.identity == G.mul(G.inv(g), g)
    h = G.prod(*[rng.choice(gens) for _ in range(5)])
    assert G.mul(G.mul(g, h), G.inv(h)) == g


def test_direct_product():
    G = make_direct_product(cyclic_group(2), make_free_group(1))
    x = G.mul((1, (1,)), (1, (1,)))
    assert x == (0, (1, 1)) and G.word_length(x) == 2


def test_dihedral_section_and_alpha():
    G, in_h, to_int = dihedral_infinite()
    sec = make_coset_section(G, in_h, 2)
    e, a = sec.reps
    assert e == G.identity and a == ((0, 1),)
    ab = ((0, 1), (1, 1))
    assert alpha(sec, G.identity, a) == G.identity
    assert alpha(sec, ab, e) == ab
    assert alpha(sec, ((0, 1),), e) == G.identity
    assert alpha(sec, ((0, 1),), a) == G.identity
    assert to_int(G.mul(ab, ab)) == 2 and to_int(G.inv(ab)) == -1
    ball = G.ball(4)
    assert check_alpha_chain_rule(sec, ball) == []
    assert check_coset_decomposition(sec, G.ball(8)) == []


def test_bass_serre_trees():
    tiny = bass_serre_ball(cyclic_group(2), cyclic_group(3), 1)
    assert tiny.pg.n == 2 and len(tiny.pg.edges) == 1
    line = bass_serre_ball(cyclic_group(2), cyclic_group(2), 6)
    assert is_tree(line.pg)
    assert max(line.pg.graph.degree(v) for v in range(line.pg.n)) == 2
    for v in interior_vertices(line):
        assert line.pg.graph.degree(v) == 2
    bi = bass_serre_ball(cyclic_group(2), cyclic_group(3), 5)
    assert is_tree(bi.pg)
    inner = interior_vertices(bi)
    assert inner
    for v in inner:
        assert bi.pg.graph.degree(v) == (2 if bi.labels[v][0] == 0 else 3)
    assert check_left_action(bi, bi.group.ball(3)) == []
