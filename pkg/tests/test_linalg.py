import math

import numpy as np
import pytest

from lamptune.errors import DegenerateData, SingularSystem
from lamptune.linalg import lu_solve, pca_top2, thin_svd_tall

PUBLISHED_A = np.array([
    [8.25391394, 5.41666345, 13.24087516],
    [5.41666345, 5.45949627, 14.00792903],
    [13.24087516, 14.00792903, 1095.0485935],
])
PUBLISHED_B = np.array([67.4299, 51.3835, 116.8538])


def _residual_ok(a, b, w):
    return np.max(np.abs(a @ w - b)) <= 1e-9 * np.max(np.abs(b))


class TestLuSolve:
    def test_published_system(self):
        w = lu_solve(PUBLISHED_A, PUBLISHED_B)
        np.testing.assert_allclose(w, [5.7097, 3.7741, -0.0106], atol=1e-3)
        assert _residual_ok(PUBLISHED_A, PUBLISHED_B, w)

    def test_identity(self):
        np.testing.assert_array_equal(lu_solve(np.eye(3), [1.0, 2.0, 3.0]), [1, 2, 3])

    def test_planted_spd(self, rng):
        for _ in range(50):
            g = rng.normal(size=(3, 3))
            a = g @ g.T + 0.5 * np.eye(3)
            w_star = rng.normal(size=3)
            b = a @ w_star
            w = lu_solve(a, b)
            np.testing.assert_allclose(w, w_star, atol=1e-9)
            assert _residual_ok(a, b, w)

    def test_needs_pivoting(self):
        a = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 2.0]])
        np.testing.assert_allclose(lu_solve(a, [3.0, 4.0, 2.0]), [4.0, 3.0, 1.0])

    def test_singular(self):
        v = np.array([1.0, 2.0, 3.0])
        with pytest.raises(SingularSystem):
            lu_solve(np.outer(v, v), v)


class TestThinSvd:
    def _check(self, m, u, s, v):
        assert np.all(s >= 0) and s[0] >= s[1]
        np.testing.assert_allclose(u.T @ u, np.eye(2), atol=1e-10)
        np.testing.assert_allclose(v.T @ v, np.eye(2), atol=1e-10)
        scale = max(np.max(np.abs(m)), 1e-300)
        assert np.max(np.abs(m - u @ np.diag(s) @ v.T)) <= 1e-10 * scale

    def test_diagonal(self):
        m = np.array([[3.0, 0.0], [0.0, 2.0], [0.0, 0.0]])
        u, s, v = thin_svd_tall(m)
        np.testing.assert_allclose(s, [3.0, 2.0])
        self._check(m, u, s, v)

    def test_rotation(self):
        t = math.radians(30)
        m = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
        u, s, v = thin_svd_tall(m)
        np.testing.assert_allclose(s, [1.0, 1.0], atol=1e-14)
        self._check(m, u, s, v)

    def test_random_reconstruction(self, rng):
        for d in (2, 3, 5, 9):
            for _ in range(40):
                m = rng.normal(size=(d, 2)) * 10.0 ** rng.uniform(-6, 6)
                self._check(m, *thin_svd_tall(m))

    def test_singular_values_match_numpy(self, rng):
        m = rng.normal(size=(5, 2))
        np.testing.assert_allclose(thin_svd_tall(m)[1], np.linalg.svd(m, compute_uv=False),
                                   rtol=1e-12)

    @pytest.mark.parametrize("m", [
        np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]),
        np.array([[0.0, 0.0], [0.0, 0.0]]),
        np.array([[0.0, 5.0], [0.0, 0.0], [0.0, 0.0], [0.0, 1.0]]),
    ])
    def test_rank_deficient(self, m):
        u, s, v = thin_svd_tall(m)
        assert s[1] == 0.0
        self._check(m, u, s, v)

    def test_ill_conditioned(self):
        m = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-9], [0.0, 0.0]])
        self._check(m, *thin_svd_tall(m))


class TestPca:
    def test_aligned_2d(self):
        pts = np.array([[-2.0, 0.0], [2.0, 0.0], [0.0, -1.0], [0.0, 1.0]])
        out = pca_top2(pts)
        np.testing.assert_allclose(np.abs(out), np.abs(pts), atol=1e-12)

    def test_collinear(self, rng):
        t = rng.normal(size=7)
        pts = np.outer(t, [1.0, -2.0, 0.5]) + [3.0, 1.0, -1.0]
        assert np.max(np.abs(pca_top2(pts)[:, 1])) <= 1e-10

    def test_variance_captured(self, rng):
        x = rng.normal(size=(10, 4)) * [3.0, 2.0, 1.0, 0.5]
        out = pca_top2(x)
        cov = np.cov(x, rowvar=False, bias=True)
        top2 = np.sort(np.linalg.eigvalsh(cov))[-2:].sum()
        np.testing.assert_allclose(np.var(out, axis=0).sum(), top2, rtol=1e-10)
        off = np.cov(out, rowvar=False, bias=True)[0, 1]
        assert abs(off) <= 1e-9 * np.trace(cov)

    def test_sign_convention(self, rng):
        x = rng.normal(size=(12, 3))
        out = pca_top2(x)
        centred = x - x.mean(0)
        dirs = np.linalg.lstsq(centred, out, rcond=None)[0].T
        for row in dirs:
            assert row[np.argmax(np.abs(row))] >= 0
        np.testing.assert_array_equal(out, pca_top2(x))

    def test_single_feature(self):
        out = pca_top2(np.array([[1.0], [2.0], [4.0]]))
        np.testing.assert_array_equal(out[:, 1], 0.0)

    def test_zero_variance(self):
        with pytest.raises(DegenerateData):
            pca_top2(np.ones((4, 3)))
