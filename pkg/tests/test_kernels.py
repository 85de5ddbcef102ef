"""Lane equivalence: every numba kernel must agree with its numpy twin."""

import numpy as np
import pytest

from stiefelcast import kernels
from stiefelcast.backend import HAVE_NUMBA

numba_only = pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")


def brute_force_trend(x, kernel):
    j, p, n = x.shape
    half = kernel // 2
    out = np.empty_like(x)
    for a in range(j):
        for v in range(n):
            for t in range(p):
                window = [x[a, min(max(u, 0), p - 1), v]
                          for u in range(t - half, t + half + 1)]
                out[a, t, v] = sum(window) / kernel
    return out


class TestTrendMovingAverage:
    def test_numpy_matches_brute_force(self, rng):
        x = rng.standard_normal((3, 9, 2))
        np.testing.assert_allclose(
            kernels.trend_moving_average_numpy(x, 5),
            brute_force_trend(x, 5), atol=1e-12)

    @numba_only
    def test_lanes_agree(self, rng):
        x = rng.standard_normal((4, 15, 3))
        for k in (1, 3, 7, 15):
            np.testing.assert_allclose(
                kernels.trend_moving_average_numba(x, k),
                kernels.trend_moving_average_numpy(x, k), atol=1e-12)


class TestLdgosmCore:
    @numba_only
    def test_lanes_agree(self, rng):
        x = rng.standard_normal((20, 5))
        e = np.maximum(x, 0.0)
        s1, w1, f1, o1, l1 = kernels.ldgosm_core_numpy(x, e, 1e-9)
        s2, w2, f2, o2, l2 = kernels.ldgosm_core_numba(x, e, 1e-9)
        assert s1 == s2 == kernels.SOLVE_OK
        np.testing.assert_allclose(w1, w2, atol=1e-10)
        np.testing.assert_allclose(f1, f2, atol=1e-10)
        assert o1 == pytest.approx(o2, rel=1e-12)
        assert l1 == pytest.approx(l2, rel=1e-10)

    @numba_only
    def test_rank_deficiency_status_agrees(self):
        x = np.zeros((6, 2))
        for core in (kernels.ldgosm_core_numpy, kernels.ldgosm_core_numba):
            status, *_ = core(x, x, 0.0)
            assert status == kernels.SOLVE_RANK_DEFICIENT


class TestSpectralChain:
    def test_forward_matches_direct_expansion(self, rng):
        p = rng.standard_normal((4, 3))
        g = rng.standard_normal((3, 4, 3))
        z, r = kernels.spectral_chain_forward_numpy(p, g)
        expected = p * g[0] + p * g[0] * g[1] + p * g[0] * g[1] * g[2]
        np.testing.assert_allclose(z, expected, atol=1e-12)
        np.testing.assert_allclose(r[2], g[0] * g[1] * g[2], atol=1e-12)

    def test_backward_matches_finite_differences(self, rng):
        p = rng.standard_normal((3, 2))
        g = rng.standard_normal((2, 3, 2))
        dz = rng.standard_normal((3, 2))
        zfun = lambda pp, gg: kernels.spectral_chain_forward_numpy(pp, gg)[0]
        _, r = kernels.spectral_chain_forward_numpy(p, g)
        dp, dg = kernels.spectral_chain_backward_numpy(dz, p, g, r)
        eps = 1e-7
        for idx in np.ndindex(p.shape):
            pp = p.copy(); pp[idx] += eps
            num = np.sum(dz * (zfun(pp, g) - zfun(p, g))) / eps
            assert num == pytest.approx(dp[idx], rel=1e-5, abs=1e-8)
        for idx in np.ndindex(g.shape):
            gg = g.copy(); gg[idx] += eps
            num = np.sum(dz * (zfun(p, gg) - zfun(p, g))) / eps
            assert num == pytest.approx(dg[idx], rel=1e-5, abs=1e-8)

    @numba_only
    def test_lanes_agree(self, rng):
        p = rng.standard_normal((5, 4))
        g = rng.standard_normal((4, 5, 4))
        dz = rng.standard_normal((5, 4))
        z1, r1 = kernels.spectral_chain_forward_numpy(p, g)
        z2, r2 = kernels.spectral_chain_forward_numba(p, g)
        np.testing.assert_allclose(z1, z2, atol=1e-13)
        np.testing.assert_allclose(r1, r2, atol=1e-13)
        dp1, dg1 = kernels.spectral_chain_backward_numpy(dz, p, g, r1)
        dp2, dg2 = kernels.spectral_chain_backward_numba(dz, p, g, r2)
        np.testing.assert_allclose(dp1, dp2, atol=1e-13)
        np.testing.assert_allclose(dg1, dg2, atol=1e-13)


class TestMaeAndSign:
    def test_values(self):
        pred = np.array([[1.0, -2.0], [0.5, 0.5]])
        target = np.array([[0.0, 0.0], [0.5, 1.5]])
        loss, sign = kernels.mae_and_sign_numpy(pred, target)
        assert loss == pytest.approx((1 + 2 + 0 + 1) / 4)
        np.testing.assert_array_equal(sign, [[1, -1], [0, -1]])

    @numba_only
    def test_lanes_agree(self, rng):
        pred = rng.standard_normal((7, 3))
        target = rng.standard_normal((7, 3))
        target[2, 1] = pred[2, 1]  # exercise the tie convention
        l1, s1 = kernels.mae_and_sign_numpy(pred, target)
        l2, s2 = kernels.mae_and_sign_numba(pred, target)
        assert l1 == pytest.approx(l2, rel=1e-15)
        np.testing.assert_array_equal(s1, s2)


class TestAdamStep:
    def _reference(self, p, g, m1, m2, t, lr, b1, b2, eps):
        m1 = b1 * m1 + (1 - b1) * g
        m2 = b2 * m2 + (1 - b2) * g * g
        return p - lr * (m1 / (1 - b1 ** t)) / (np.sqrt(m2 / (1 - b2 ** t)) + eps), m1, m2

    def test_single_step_matches_reference(self, rng):
        p = rng.standard_normal(10)
        g = rng.standard_normal(10)
        expect, _, _ = self._reference(p.copy(), g, np.zeros(10), np.zeros(10),
                                       1, 1e-3, 0.9, 0.999, 1e-8)
        m1, m2 = np.zeros(10), np.zeros(10)
        kernels.adam_step_numpy(p, g, m1, m2, 1, 1e-3, 0.9, 0.999, 1e-8)
        np.testing.assert_allclose(p, expect, atol=1e-15)

    def test_zero_learning_rate_is_noop(self, rng):
        p = rng.standard_normal(6)
        before = p.copy()
        kernels.adam_step_numpy(p, rng.standard_normal(6), np.zeros(6),
                                np.zeros(6), 1, 0.0, 0.9, 0.999, 1e-8)
        np.testing.assert_array_equal(p, before)

    @numba_only
    def test_lanes_agree(self, rng):
        p1 = rng.standard_normal(20)
        p2 = p1.copy()
        m1a, m2a = np.zeros(20), np.zeros(20)
        m1b, m2b = np.zeros(20), np.zeros(20)
        for t in range(1, 6):
            g = rng.standard_normal(20)
            kernels.adam_step_numpy(p1, g, m1a, m2a, t, 1e-3, 0.9, 0.999, 1e-8)
            kernels.adam_step_numba(p2, g, m1b, m2b, t, 1e-3, 0.9, 0.999, 1e-8)
        np.testing.assert_allclose(p1, p2, atol=1e-14)
