"""Vectorised NumPy kernels, used when numba is disabled or missing."""

import numpy as np

from ._svd2 import svd_tall_2_batch

# rows per LAMP batch; bounds the (rows, controls, d) temporaries
_CHUNK = 512


def pairwise_distances(x):
    n, d = x.shape
    acc = np.zeros((n, n))
    # accumulate feature by feature: same summation order as the scalar loop
    for k in range(d):
        diff = x[:, k, None] - x[None, :, k]
        acc += diff * diff
    return np.sqrt(acc)


def knn_indices(dist, k):
    masked = dist.copy()
    np.fill_diagonal(masked, np.inf)
    return np.argsort(masked, axis=1, kind="stable")[:, :k].astype(np.int64)


def silhouette_terms(dist, codes, n_classes):
    n = dist.shape[0]
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), codes] = 1.0
    counts = onehot.sum(axis=0).astype(np.int64)
    own = counts[codes]
    same_sum = (dist @ onehot)[np.arange(n), codes]
    other = np.where(codes[None, :] == codes[:, None], np.inf, dist).min(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        a = same_sum / (own - 1)
        top = np.maximum(a, other)
        out = (other - a) / top
    out[(own < 2) | ~(top > 0.0)] = 0.0
    return out


def lamp_map(x, xc, yc, eps_w, eps_c, keep_maps):
    n, d = x.shape
    coords = np.empty((n, 2))
    hits = np.full(n, -1, dtype=np.int64)
    top_sv = np.zeros(n)
    maps = np.zeros((n if keep_maps else 0, d, 2))
    for start in range(0, n, _CHUNK):
        rows = slice(start, min(start + _CHUNK, n))
        diff = xc[None, :, :] - x[rows, None, :]
        sq = np.einsum("ncd,ncd->nc", diff, diff)
        near = sq <= eps_c * eps_c
        hit = np.where(near.any(axis=1), near.argmax(axis=1), -1)
        alpha = 1.0 / (sq + eps_w)
        total = alpha.sum(axis=1)
        xt = (alpha @ xc) / total[:, None]
        yt = (alpha @ yc) / total[:, None]
        xhat = xc[None, :, :] - xt[:, None, :]
        yhat = yc[None, :, :] - yt[:, None, :]
        atb = np.einsum("nc,ncd,nce->nde", alpha, xhat, yhat)
        u, s, v = svd_tall_2_batch(atb)
        m = u @ np.swapaxes(v, 1, 2)
        out = np.einsum("nd,nde->ne", x[rows] - xt, m) + yt
        got = hit >= 0
        out[got] = yc[hit[got]]
        sv = s[:, 0].copy()
        sv[got] = np.inf
        coords[rows] = out
        hits[rows] = hit
        top_sv[rows] = sv
        if keep_maps:
            maps[rows] = m
    return coords, hits, top_sv, maps
