"""Compare the compiled and pure-Python kernels on random graphs.

    python benchmarks/bench_kernels.py --sizes 50 200 500 --repeat 3
"""
import argparse
import time

import numpy as np

from qtfree import _pykernels
from qtfree.rng import XorShift64Star, random_connected_graph

try:
    from qtfree import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench(n, repeat, seed, defect_cap):
    pg = random_connected_graph(XorShift64Star(seed), n, extra_edge_prob=0.05)
    indptr, indices = pg.graph.csr
    depth = pg.depth.astype(np.int64)
    D = pg.dist.astype(np.int64)
    jobs = [
        ("bfs_all_pairs", lambda m: m.bfs_all_pairs(pg.n, indptr, indices)),
        ("gromov_radius_matrix", lambda m: m.gromov_radius_matrix(depth, indptr, indices)),
    ]
    if n <= defect_cap:
        jobs.append(("four_point_defect", lambda m: m.four_point_defect(D)))
    rows = []
    for name, job in jobs:
        t_py, r_py = best_of(lambda: job(_pykernels), repeat)
        if _ckernels is None:
            rows.append((name, n, t_py, None))
            continue
        t_c, r_c = best_of(lambda: job(_ckernels), repeat)
        if not np.array_equal(np.asarray(r_py), np.asarray(r_c)):
            raise SystemExit(f"backends disagree on {name} (n={n})")
        rows.append((name, n, t_py, t_c))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 200, 500])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--defect-cap", type=int, default=120,
                    help="skip the O(n^4) four-point kernel above this size")
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; timing the Python kernels only")
    print(f"{'kernel':<22}{'n':>6}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for n in args.sizes:
        for name, size, t_py, t_c in bench(n, args.repeat, args.seed, args.defect_cap):
            if t_c is None:
                print(f"{name:<22}{size:>6}{t_py:>12.4f}{'-':>12}{'-':>10}")
            else:
                print(f"{name:<22}{size:>6}{t_py:>12.4f}{t_c:>12.4f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
