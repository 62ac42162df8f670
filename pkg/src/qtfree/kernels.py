"""Kernel dispatch: compiled ``_ckernels`` when importable, else ``_pykernels``.

Set ``QTF_PURE=1`` to force the pure-Python path.
"""
import os

if os.environ.get("QTF_PURE"):
    from ._pykernels import bfs_all_pairs, four_point_defect, gromov_radius_matrix

    BACKEND = "python"
else:
    try:
        from ._ckernels import bfs_all_pairs, four_point_defect, gromov_radius_matrix

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        from ._pykernels import bfs_all_pairs, four_point_defect, gromov_radius_matrix

        BACKEND = "python"

__all__ = ["BACKEND", "bfs_all_pairs", "four_point_defect", "gromov_radius_matrix"]
