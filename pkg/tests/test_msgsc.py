import numpy as np
import pytest

import stiefelcast.msgsc as msgsc_mod
from stiefelcast.errors import DimensionError
from stiefelcast.msgsc import KernelStack, msgsc_fast, msgsc_naive, spectral_kernels
from stiefelcast.spectral import StiefelBasis, sgft, sgsc
from stiefelcast.verify import random_orthonormal


@pytest.fixture
def basis(rng):
    return StiefelBasis(random_orthonormal(rng, 10, 4))


class TestKernelStack:
    def test_rejects_empty(self):
        with pytest.raises(DimensionError):
            KernelStack([])

    def test_rejects_mixed_shapes(self, rng):
        with pytest.raises(DimensionError):
            KernelStack([rng.standard_normal((4, 2)),
                         rng.standard_normal((4, 3))])

    def test_layer_count(self, rng):
        stack = KernelStack([rng.standard_normal((4, 2)) for _ in range(3)])
        assert stack.m == 3


class TestSpectralKernels:
    def test_zero_weights(self, basis):
        out = spectral_kernels(basis, KernelStack([np.zeros((10, 3))]))
        np.testing.assert_array_equal(out[0], np.zeros((4, 3)))

    def test_identity_basis_selects_rows(self, rng):
        f = StiefelBasis(np.eye(6)[:, :2])
        w = rng.standard_normal((6, 3))
        out = spectral_kernels(f, KernelStack([w]))
        np.testing.assert_array_equal(out[0], w[:2])

    def test_matches_naive_multiply(self, rng, basis):
        w = rng.standard_normal((10, 3))
        expected = np.empty((4, 3))
        for i in range(4):
            for k in range(3):
                expected[i, k] = sum(basis.f[n, i] * w[n, k] for n in range(10))
        out = spectral_kernels(basis, KernelStack([w]))
        np.testing.assert_allclose(out[0], expected, atol=1e-12)

    def test_row_mismatch(self, rng, basis):
        with pytest.raises(DimensionError):
            spectral_kernels(basis, KernelStack([rng.standard_normal((9, 3))]))


class TestMsgscFast:
    def test_single_layer_equals_sgsc(self, rng, basis):
        x = rng.standard_normal((10, 3))
        g = rng.standard_normal((10, 3))
        out = msgsc_fast(basis, x, [sgft(basis, g)])
        np.testing.assert_allclose(out, sgsc(basis, x, g), atol=1e-12)

    def test_all_ones_layer_is_noop_in_product(self, rng, basis):
        x = rng.standard_normal((10, 3))
        g1 = sgft(basis, rng.standard_normal((10, 3)))
        ones = np.ones_like(g1)
        # [g1, ones] accumulates g1 twice: once alone, once multiplied by ones
        out = msgsc_fast(basis, x, [g1, ones])
        single = msgsc_fast(basis, x, [g1])
        np.testing.assert_allclose(out, 2.0 * single, atol=1e-12)

    def test_matches_naive_depth_three(self, rng, basis):
        x = rng.standard_normal((10, 5))
        g_list = [rng.standard_normal((10, 5)) for _ in range(3)]
        spectra = [sgft(basis, g) for g in g_list]
        np.testing.assert_allclose(
            msgsc_fast(basis, x, spectra),
            msgsc_naive(basis, x, g_list),
            atol=1e-9,
        )

    def test_exactly_one_transform_pair(self, rng, basis, monkeypatch):
        calls = {"sgft": 0, "isgft": 0}
        real_sgft, real_isgft = msgsc_mod.sgft, msgsc_mod.isgft

        def counting_sgft(f, x):
            calls["sgft"] += 1
            return real_sgft(f, x)

        def counting_isgft(f, z):
            calls["isgft"] += 1
            return real_isgft(f, z)

        monkeypatch.setattr(msgsc_mod, "sgft", counting_sgft)
        monkeypatch.setattr(msgsc_mod, "isgft", counting_isgft)
        x = rng.standard_normal((10, 2))
        spectra = [rng.standard_normal((4, 2)) for _ in range(4)]
        msgsc_fast(basis, x, spectra)
        assert calls == {"sgft": 1, "isgft": 1}

    def test_linear_in_signal(self, rng, basis):
        x1 = rng.standard_normal((10, 3))
        x2 = rng.standard_normal((10, 3))
        spectra = [rng.standard_normal((4, 3)) for _ in range(2)]
        lhs = msgsc_fast(basis, 2.0 * x1 - 0.5 * x2, spectra)
        rhs = 2.0 * msgsc_fast(basis, x1, spectra) - 0.5 * msgsc_fast(basis, x2, spectra)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_shape_errors(self, rng, basis):
        with pytest.raises(DimensionError):
            msgsc_fast(basis, rng.standard_normal((10, 2)),
                       [rng.standard_normal((3, 2))])
        with pytest.raises(DimensionError):
            msgsc_fast(basis, rng.standard_normal((10, 2)), [])


class TestMsgscNaive:
    def test_single_layer_is_one_convolution(self, rng, basis):
        x = rng.standard_normal((10, 3))
        g = rng.standard_normal((10, 3))
        np.testing.assert_allclose(
            msgsc_naive(basis, x, [g]), sgsc(basis, x, g), atol=1e-12
        )

    def test_ones_spectrum_first_layer(self, rng, basis):
        x = rng.standard_normal((10, 2))
        g1 = basis.f @ np.ones((4, 2))  # F'g1 = ones -> first term projects x
        g2 = rng.standard_normal((10, 2))
        out = msgsc_naive(basis, x, [g1, g2])
        proj = basis.f @ basis.f.T @ x
        np.testing.assert_allclose(out, proj + sgsc(basis, proj, g2), atol=1e-12)


class TestLemmaChain:
    def test_transform_of_chain_is_product_of_spectra(self, rng, basis):
        # S(x * g1 * ... * gi) = S(x) ⊙ prod_j S(gj), checked directly
        x = rng.standard_normal((10, 3))
        g_list = [rng.standard_normal((10, 3)) for _ in range(3)]
        term = x
        prod = np.ones((4, 3))
        for g in g_list:
            term = sgsc(basis, term, g)
            prod = prod * sgft(basis, g)
            np.testing.assert_allclose(sgft(basis, term), sgft(basis, x) * prod,
                                       atol=1e-10)
