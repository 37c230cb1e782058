import math

import numpy as np
import pytest

from hurwitzcf.taylor import (
    SingularJet,
    SingularKernel,
    TaylorJet,
    derivative_scale,
    jet_add,
    jet_const,
    jet_mul,
    jet_recip,
    jet_scale,
    jet_var,
    kernel_jet,
    kernel_matrix,
    kernel_matrix_fd_check,
    kernel_weighted_sums,
)


def _rng_jet(rng: np.random.Generator, L: int, unit_constant: bool = False) -> TaylorJet:
    c = rng.normal(size=(L + 1, L + 1))
    if unit_constant:
        c[0, 0] = 1.0 + abs(c[0, 0])
    return TaylorJet(L, c)


class TestJetAlgebra:
    def test_shape_checked(self):
        with pytest.raises(ValueError):
            TaylorJet(3, np.zeros((2, 2)))

    def test_const_and_var(self):
        c = jet_const(2.5, 3)
        assert c.constant == 2.5
        assert np.count_nonzero(c.coeffs) == 1
        x = jet_var("x", -0.5, 3)
        assert x.coeffs[0, 0] == -0.5
        assert x.coeffs[1, 0] == 1.0
        y = jet_var("y", 0.25, 3)
        assert y.coeffs[0, 1] == 1.0
        with pytest.raises(ValueError):
            jet_var("z", 0.0, 3)

    def test_mul_matches_polynomial_product(self):
        L = 4
        one_plus_2x = jet_add(jet_const(1.0, L), jet_scale(jet_var("x", 0.0, L), 2.0))
        one_minus_3y = jet_add(jet_const(1.0, L), jet_scale(jet_var("y", 0.0, L), -3.0))
        prod = jet_mul(one_plus_2x, one_minus_3y)
        expect = np.zeros((L + 1, L + 1))
        expect[0, 0] = 1.0
        expect[1, 0] = 2.0
        expect[0, 1] = -3.0
        expect[1, 1] = -6.0
        assert np.allclose(prod.coeffs, expect)

    def test_mul_commutes(self):
        rng = np.random.default_rng(3)
        f = _rng_jet(rng, 5)
        g = _rng_jet(rng, 5)
        assert np.allclose(jet_mul(f, g).coeffs, jet_mul(g, f).coeffs)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            jet_add(jet_const(1.0, 3), jet_const(1.0, 4))

    def test_recip_of_linear(self):
        # 1/(1 + x + y) has coefficients (-1)^(m+n) * binom(m+n, m)
        L = 5
        f = jet_add(
            jet_add(jet_const(1.0, L), jet_var("x", 0.0, L)),
            jet_var("y", 0.0, L),
        )
        r = jet_recip(f)
        for m in range(L + 1):
            for n in range(L + 1):
                want = (-1.0) ** (m + n) * math.comb(m + n, m)
                assert r.coeffs[m, n] == pytest.approx(want, rel=1e-12)

    def test_recip_is_involutive(self):
        rng = np.random.default_rng(8)
        f = _rng_jet(rng, 4, unit_constant=True)
        back = jet_recip(jet_recip(f))
        assert np.allclose(back.coeffs, f.coeffs, atol=1e-10)

    def test_recip_times_original_is_one(self):
        rng = np.random.default_rng(13)
        f = _rng_jet(rng, 4, unit_constant=True)
        prod = jet_mul(f, jet_recip(f))
        expect = np.zeros((5, 5))
        expect[0, 0] = 1.0
        assert np.allclose(prod.coeffs, expect, atol=1e-10)

    def test_recip_rejects_zero_constant(self):
        f = jet_var("x", 0.0, 3)
        with pytest.raises(SingularJet):
            jet_recip(f)

    def test_derivative_applies_factorials(self):
        c = np.zeros((4, 4))
        c[2, 3] = 0.5
        j = TaylorJet(3, c)
        assert j.derivative(2, 3) == pytest.approx(0.5 * 2 * 6)

    def test_derivative_scale_matrix(self):
        s = derivative_scale(4)
        assert s.shape == (5, 5)
        assert s[0, 0] == 1.0
        assert s[3, 2] == pytest.approx(math.factorial(3) * math.factorial(2))


class TestKernel:
    def test_flat_pixel_gives_constant_one(self):
        j = kernel_jet(0.0, 0.0, -0.3, 0.1, L=4)
        expect = np.zeros((5, 5))
        expect[0, 0] = 1.0
        assert np.allclose(j.coeffs, expect)

    def test_matrix_is_raw_derivatives_of_jet(self):
        a, b, x0, y0 = 0.37, -0.81, -0.5, -0.5
        j = kernel_jet(a, b, x0, y0, L=5)
        m = kernel_matrix(a, b, x0, y0, L=5)
        assert np.allclose(m, j.coeffs * derivative_scale(5))
        assert m[2, 3] == pytest.approx(j.derivative(2, 3))

    def test_constant_term_is_kernel_value(self):
        a, b, x0, y0 = 0.4, 0.2, -0.25, 0.3
        w = complex(a, b)
        z = complex(x0, y0)
        direct = 1.0 / abs(w * z + 1.0) ** 4
        assert kernel_jet(a, b, x0, y0, 3).constant == pytest.approx(direct)

    def test_singular_pixel_rejected(self):
        # at z = -0.5-0.5i the kernel blows up at w = 1-i
        with pytest.raises(SingularKernel):
            kernel_jet(1.0, -1.0, -0.5, -0.5, 3)

    def test_weighted_sums_linearity(self):
        a = np.array([0.1, -0.6])
        b = np.array([0.4, 0.9])
        w = np.array([0.7, 1.3])
        total, skipped = kernel_weighted_sums(a, b, w, -0.5, -0.5, 4)
        assert skipped == 0
        parts = [
            kernel_weighted_sums(a[i : i + 1], b[i : i + 1], w[i : i + 1], -0.5, -0.5, 4)[0]
            for i in range(2)
        ]
        assert np.allclose(total, parts[0] + parts[1])

    def test_weighted_sums_skips_singular_pixel(self):
        a = np.array([1.0, 0.2])
        b = np.array([-1.0, 0.2])
        w = np.array([1.0, 1.0])
        total, skipped = kernel_weighted_sums(a, b, w, -0.5, -0.5, 3)
        assert skipped == 1
        clean, _ = kernel_weighted_sums(a[1:], b[1:], w[1:], -0.5, -0.5, 3)
        assert np.allclose(total, clean)

    def test_matrix_agrees_with_finite_differences(self):
        dev = kernel_matrix_fd_check(0.3, -0.4, -0.5, -0.5, 4)
        assert dev < 1e-5

    def test_length_validation(self):
        with pytest.raises(ValueError):
            kernel_weighted_sums(np.ones(3), np.ones(2), np.ones(3), 0.0, 0.0, 2)
