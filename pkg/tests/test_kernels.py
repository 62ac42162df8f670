import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from qtfree import _pykernels, kernels
from qtfree.graph_metric import cycle_graph, grid_graph
from qtfree.kerr_tree import ro_matrix
from qtfree.rng import XorShift64Star, random_connected_graph

try:
    from qtfree import _ckernels
except ImportError:  # pragma: no cover - extension not built
    _ckernels = None

backends = [_pykernels] + ([_ckernels] if _ckernels is not None else [])


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("mod", backends, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_bfs_matches_networkx(mod):
    pg = grid_graph(3, 4)
    indptr, indices = pg.graph.csr
    D = np.asarray(mod.bfs_all_pairs(pg.n, indptr, indices))
    assert np.array_equal(D, oracles.distances(pg))


@pytest.mark.parametrize("mod", backends, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_radius_matrix_by_definition(mod):
    for pg in (cycle_graph(7), grid_graph(2, 4), cycle_graph(6, basepoint=2)):
        indptr, indices = pg.graph.csr
        R = np.asarray(mod.gromov_radius_matrix(pg.depth.astype(np.int64), indptr, indices))
        for x in range(pg.n):
            for y in range(pg.n):
                assert R[x, y] == oracles.r_o_by_definition(pg, x, y)


@pytest.mark.parametrize("mod", backends, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_four_point_against_brute_force(mod):
    rng = XorShift64Star(11)
    for _ in range(10):
        pg = random_connected_graph(rng, rng.randint(2, 9), extra_edge_prob=0.3)
        D = pg.dist.astype(np.int64)
        assert int(mod.four_point_defect(D)) == oracles.four_point_brute(D.tolist())


@pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 40))
def test_backends_agree(seed, n):
    pg = random_connected_graph(XorShift64Star(seed), n)
    indptr, indices = pg.graph.csr
    depth = pg.depth.astype(np.int64)
    D = pg.dist.astype(np.int64)
    assert np.array_equal(np.asarray(_ckernels.bfs_all_pairs(pg.n, indptr, indices)),
                          np.asarray(_pykernels.bfs_all_pairs(pg.n, indptr, indices)))
    assert np.array_equal(np.asarray(_ckernels.gromov_radius_matrix(depth, indptr, indices)),
                          np.asarray(_pykernels.gromov_radius_matrix(depth, indptr, indices)))
    assert int(_ckernels.four_point_defect(D)) == int(_pykernels.four_point_defect(D))


def test_ro_matrix_symmetric_and_bounded():
    pg = grid_graph(3, 3, basepoint=4)
    R = ro_matrix(pg)
    assert (R == R.T).all()
    d = pg.depth
    assert (R <= np.minimum.outer(d, d)).all()
    assert (np.diag(R) == d).all()
