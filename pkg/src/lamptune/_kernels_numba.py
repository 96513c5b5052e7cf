"""Numba-compiled kernels. Each mirrors a function in ``_kernels_numpy``."""

import math
import warnings

import numpy as np
from numba import njit, prange

# an old system TBB only disables that threading layer; numba falls back
warnings.filterwarnings("ignore", message="The TBB threading layer")

from ._svd2 import svd_tall_2

_svd_tall_2 = njit(cache=True)(svd_tall_2)


@njit(parallel=True, cache=True)
def pairwise_distances(x):
    n, d = x.shape
    out = np.zeros((n, n))
    for i in prange(n):
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(d):
                diff = x[i, k] - x[j, k]
                acc += diff * diff
            out[i, j] = math.sqrt(acc)
    for i in range(n):
        for j in range(i + 1, n):
            out[j, i] = out[i, j]
    return out


@njit(parallel=True, cache=True)
def knn_indices(dist, k):
    n = dist.shape[0]
    out = np.empty((n, k), dtype=np.int64)
    for i in prange(n):
        # bounded insertion; strict comparisons keep ties in ascending index
        best = np.empty(k)
        m = 0
        for j in range(n):
            if j == i:
                continue
            d = dist[i, j]
            if m == k and not d < best[k - 1]:
                continue
            p = m if m < k else k - 1
            while p > 0 and best[p - 1] > d:
                best[p] = best[p - 1]
                out[i, p] = out[i, p - 1]
                p -= 1
            best[p] = d
            out[i, p] = j
            if m < k:
                m += 1
    return out


@njit(parallel=True, cache=True)
def silhouette_terms(dist, codes, n_classes):
    n = dist.shape[0]
    counts = np.zeros(n_classes, dtype=np.int64)
    for i in range(n):
        counts[codes[i]] += 1
    out = np.zeros(n)
    for i in prange(n):
        ci = codes[i]
        if counts[ci] < 2:
            continue
        same = 0.0
        other = np.inf
        for j in range(n):
            if codes[j] == ci:
                if j != i:
                    same += dist[i, j]
            elif dist[i, j] < other:
                other = dist[i, j]
        a = same / (counts[ci] - 1)
        top = max(a, other)
        if top > 0.0:
            out[i] = (other - a) / top
    return out


@njit(parallel=True, cache=True)
def lamp_map(x, xc, yc, eps_w, eps_c, keep_maps):
    n, d = x.shape
    c = xc.shape[0]
    coords = np.empty((n, 2))
    hits = np.full(n, -1, dtype=np.int64)
    top_sv = np.zeros(n)
    maps = np.zeros((n if keep_maps else 0, d, 2))
    eps_c2 = eps_c * eps_c
    for i in prange(n):
        alpha = np.empty(c)
        hit = -1
        for j in range(c):
            acc = 0.0
            for k in range(d):
                diff = xc[j, k] - x[i, k]
                acc += diff * diff
            if acc <= eps_c2:
                hit = j
                break
            alpha[j] = 1.0 / (acc + eps_w)
        if hit >= 0:
            hits[i] = hit
            coords[i, 0] = yc[hit, 0]
            coords[i, 1] = yc[hit, 1]
            top_sv[i] = np.inf
            continue

        total = 0.0
        for j in range(c):
            total += alpha[j]
        xt = np.zeros(d)
        yt = np.zeros(2)
        for j in range(c):
            for k in range(d):
                xt[k] += alpha[j] * xc[j, k]
            yt[0] += alpha[j] * yc[j, 0]
            yt[1] += alpha[j] * yc[j, 1]
        for k in range(d):
            xt[k] /= total
        yt[0] /= total
        yt[1] /= total

        # A^T B with A = sqrt(alpha) xhat, B = sqrt(alpha) yhat
        atb = np.zeros((d, 2))
        for j in range(c):
            y0 = yc[j, 0] - yt[0]
            y1 = yc[j, 1] - yt[1]
            for k in range(d):
                xh = alpha[j] * (xc[j, k] - xt[k])
                atb[k, 0] += xh * y0
                atb[k, 1] += xh * y1

        u = np.empty((d, 2))
        s = np.empty(2)
        v = np.empty((2, 2))
        _svd_tall_2(atb, u, s, v)
        top_sv[i] = s[0]

        m = np.empty((d, 2))
        for k in range(d):
            m[k, 0] = u[k, 0] * v[0, 0] + u[k, 1] * v[0, 1]
            m[k, 1] = u[k, 0] * v[1, 0] + u[k, 1] * v[1, 1]
        f0 = yt[0]
        f1 = yt[1]
        for k in range(d):
            diff = x[i, k] - xt[k]
            f0 += diff * m[k, 0]
            f1 += diff * m[k, 1]
        coords[i, 0] = f0
        coords[i, 1] = f1
        if keep_maps:
            for k in range(d):
                maps[i, k, 0] = m[k, 0]
                maps[i, k, 1] = m[k, 1]
    return coords, hits, top_sv, maps
