"""Small dense linear algebra: LU solve, thin SVD of d x 2 matrices, PCA."""

import numpy as np

from ._svd2 import svd_tall_2
from .errors import DegenerateData, SingularSystem

PIVOT_TOL = 1e-12


def lu_factor(a, pivot_tol=PIVOT_TOL):
    """Doolittle LU factorisation with partial pivoting.

    Returns the packed factors (unit lower triangle below the diagonal, U on
    and above it) and the row permutation.
    """
    lu = np.array(a, dtype=np.float64, copy=True)
    if lu.ndim != 2 or lu.shape[0] != lu.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {lu.shape}")
    n = lu.shape[0]
    perm = np.arange(n)
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(lu[col:, col])))
        if abs(lu[pivot, col]) <= pivot_tol:
            raise SingularSystem(
                f"pivot {lu[pivot, col]:.3e} in column {col} is below {pivot_tol:g}"
            )
        if pivot != col:
            lu[[col, pivot]] = lu[[pivot, col]]
            perm[[col, pivot]] = perm[[pivot, col]]
        for row in range(col + 1, n):
            factor = lu[row, col] / lu[col, col]
            lu[row, col] = factor
            lu[row, col + 1:] -= factor * lu[col, col + 1:]
    return lu, perm


def lu_solve(a, b, pivot_tol=PIVOT_TOL):
    """Solve ``a @ w = b`` by LU decomposition with partial pivoting.

    Parameters
    ----------
    a : (n, n) array_like
        System matrix; for the metric trainer this is the 3 x 3 Gram matrix of
        the metric features.
    b : (n,) array_like
        Right-hand side.
    pivot_tol : float
        Pivots whose magnitude does not exceed this raise ``SingularSystem``.

    Returns
    -------
    w : ndarray, shape (n,)
    """
    lu, perm = lu_factor(a, pivot_tol)
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (lu.shape[0],):
        raise ValueError(f"right-hand side has shape {b.shape}, expected ({lu.shape[0]},)")
    n = lu.shape[0]
    y = b[perm].copy()
    for i in range(n):
        y[i] -= lu[i, :i] @ y[:i]
    w = np.empty(n)
    for i in range(n - 1, -1, -1):
        w[i] = (y[i] - lu[i, i + 1:] @ w[i + 1:]) / lu[i, i]
    return w


def thin_svd_tall(m):
    """Thin SVD of a d x 2 matrix (d >= 2) via the 2 x 2 Gram eigenproblem.

    Returns ``(u, s, v)`` with ``m == u @ np.diag(s) @ v.T``, singular values
    descending, ``u`` column-orthonormal and ``v`` orthogonal. A rank-deficient
    input gets a zero singular value and a completed second column of ``u``.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] != 2 or m.shape[0] < 2:
        raise ValueError(f"expected a d x 2 matrix with d >= 2, got shape {m.shape}")
    u = np.empty((m.shape[0], 2))
    s = np.empty(2)
    v = np.empty((2, 2))
    svd_tall_2(m, u, s, v)
    return u, s, v


def pca_top2(points):
    """Project mean-centred points onto their two leading principal directions.

    The sign of each direction is fixed so that its largest-magnitude entry
    is nonnegative. Data with a single feature gets a zero second coordinate.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 3:
        raise ValueError(f"pca_top2 needs at least 3 points, got shape {x.shape}")
    centred = x - x.mean(axis=0)
    if not np.any(centred):
        raise DegenerateData("total variance is zero")
    _, _, vt = np.linalg.svd(centred, full_matrices=False)
    dirs = vt[:2].copy()
    for row in dirs:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    coords = np.zeros((x.shape[0], 2))
    coords[:, : dirs.shape[0]] = centred @ dirs.T
    return coords
