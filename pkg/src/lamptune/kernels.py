"""Dispatch of the hot kernels to the active backend (see ``_accel``)."""

import numpy as np

from . import _accel
from . import _kernels_numpy

if _accel.HAS_NUMBA:
    from . import _kernels_numba
else:  # pragma: no cover
    _kernels_numba = None


def _impl():
    if _accel.get_backend() == "numba":
        return _kernels_numba
    return _kernels_numpy


def pairwise_distances(x):
    return _impl().pairwise_distances(np.ascontiguousarray(x, dtype=np.float64))


def knn_indices(dist, k):
    return _impl().knn_indices(np.ascontiguousarray(dist, dtype=np.float64), int(k))


def silhouette_terms(dist, codes, n_classes):
    return _impl().silhouette_terms(
        np.ascontiguousarray(dist, dtype=np.float64),
        np.ascontiguousarray(codes, dtype=np.int64),
        int(n_classes),
    )


def lamp_map(x, xc, yc, eps_w, eps_c, keep_maps=False):
    return _impl().lamp_map(
        np.ascontiguousarray(x, dtype=np.float64),
        np.ascontiguousarray(xc, dtype=np.float64),
        np.ascontiguousarray(yc, dtype=np.float64),
        float(eps_w),
        float(eps_c),
        bool(keep_maps),
    )
