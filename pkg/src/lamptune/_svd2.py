"""Closed-form thin SVD of a d x 2 matrix.

Written with scalar loops only so the same source can be compiled by numba
(see ``_kernels_numba``) or run as plain Python on a single matrix.
"""

import math

import numpy as np

# relative size below which the second left vector is treated as undefined
RANK_TOL = 1e-13


def svd_tall_2(m, u, s, v):
    """Fill ``u`` (d x 2), ``s`` (2,) and ``v`` (2 x 2) so that m = u diag(s) v^T."""
    d = m.shape[0]
    p = 0.0
    q = 0.0
    r = 0.0
    for k in range(d):
        a = m[k, 0]
        b = m[k, 1]
        p += a * a
        q += a * b
        r += b * b

    half = 0.5 * (p - r)
    if half == 0.0 and q == 0.0:
        c = 1.0
        sn = 0.0
    else:
        theta = 0.5 * math.atan2(q, half)
        c = math.cos(theta)
        sn = math.sin(theta)
    v1x, v1y = c, sn
    v2x, v2y = -sn, c

    n1 = 0.0
    n2 = 0.0
    for k in range(d):
        w1 = m[k, 0] * v1x + m[k, 1] * v1y
        w2 = m[k, 0] * v2x + m[k, 1] * v2y
        u[k, 0] = w1
        u[k, 1] = w2
        n1 += w1 * w1
        n2 += w2 * w2
    if n2 > n1:
        for k in range(d):
            tmp = u[k, 0]
            u[k, 0] = u[k, 1]
            u[k, 1] = -tmp
        v1x, v1y, v2x, v2y = v2x, v2y, -v1x, -v1y
        n1, n2 = n2, n1
    s1 = math.sqrt(n1)

    if s1 == 0.0:
        for k in range(d):
            u[k, 0] = 0.0
            u[k, 1] = 0.0
        u[0, 0] = 1.0
        u[1, 1] = 1.0
        s[0] = 0.0
        s[1] = 0.0
    else:
        for k in range(d):
            u[k, 0] /= s1
        # two Gram-Schmidt passes keep u orthonormal when s2 << s1
        for _ in range(2):
            dot = 0.0
            for k in range(d):
                dot += u[k, 0] * u[k, 1]
            for k in range(d):
                u[k, 1] -= dot * u[k, 0]
        nt = 0.0
        for k in range(d):
            nt += u[k, 1] * u[k, 1]
        nt = math.sqrt(nt)
        if nt <= RANK_TOL * s1:
            best = 0
            for k in range(1, d):
                if abs(u[k, 0]) < abs(u[best, 0]):
                    best = k
            for k in range(d):
                u[k, 1] = 0.0
            u[best, 1] = 1.0
            for _ in range(2):
                dot = 0.0
                for k in range(d):
                    dot += u[k, 0] * u[k, 1]
                for k in range(d):
                    u[k, 1] -= dot * u[k, 0]
            norm = 0.0
            for k in range(d):
                norm += u[k, 1] * u[k, 1]
            norm = math.sqrt(norm)
            for k in range(d):
                u[k, 1] /= norm
            nt = 0.0
        else:
            for k in range(d):
                u[k, 1] /= nt
        s[0] = s1
        s[1] = nt

    v[0, 0] = v1x
    v[1, 0] = v1y
    v[0, 1] = v2x
    v[1, 1] = v2y


def svd_tall_2_batch(m):
    """Vectorised counterpart of :func:`svd_tall_2` over a stack (n, d, 2)."""
    m = np.asarray(m, dtype=np.float64)
    n, d, _ = m.shape
    a = m[:, :, 0]
    b = m[:, :, 1]
    p = np.einsum("nk,nk->n", a, a)
    q = np.einsum("nk,nk->n", a, b)
    r = np.einsum("nk,nk->n", b, b)
    theta = 0.5 * np.arctan2(q, 0.5 * (p - r))
    c = np.cos(theta)
    sn = np.sin(theta)
    v = np.empty((n, 2, 2))
    v[:, 0, 0] = c
    v[:, 1, 0] = sn
    v[:, 0, 1] = -sn
    v[:, 1, 1] = c

    w = m @ v
    n1 = np.einsum("nk,nk->n", w[:, :, 0], w[:, :, 0])
    n2 = np.einsum("nk,nk->n", w[:, :, 1], w[:, :, 1])
    swap = n2 > n1
    if swap.any():
        w[swap] = np.stack([w[swap, :, 1], -w[swap, :, 0]], axis=-1)
        v[swap] = np.stack([v[swap, :, 1], -v[swap, :, 0]], axis=-1)
        n1, n2 = np.where(swap, n2, n1), np.where(swap, n1, n2)
    s1 = np.sqrt(n1)

    u = np.zeros((n, d, 2))
    s = np.zeros((n, 2))
    live = s1 > 0.0
    u[~live, 0, 0] = 1.0
    u[~live, 1, 1] = 1.0

    u1 = w[live, :, 0] / s1[live, None]
    t = w[live, :, 1]
    for _ in range(2):
        t = t - np.einsum("nk,nk->n", u1, t)[:, None] * u1
    nt = np.sqrt(np.einsum("nk,nk->n", t, t))
    low = nt <= RANK_TOL * s1[live]
    if low.any():
        e = np.zeros((int(low.sum()), d))
        e[np.arange(e.shape[0]), np.argmin(np.abs(u1[low]), axis=1)] = 1.0
        for _ in range(2):
            e = e - np.einsum("nk,nk->n", u1[low], e)[:, None] * u1[low]
        t[low] = e / np.sqrt(np.einsum("nk,nk->n", e, e))[:, None]
        nt = np.where(low, 0.0, nt)
    ok = ~low
    t[ok] = t[ok] / nt[ok, None]
    u[live, :, 0] = u1
    u[live, :, 1] = t
    s[live, 0] = s1[live]
    s[live, 1] = nt
    return u, s, v
