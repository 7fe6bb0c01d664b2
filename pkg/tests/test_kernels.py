import numpy as np
import pytest
from scipy import integrate, optimize

from hardyproj.errors import GridTooSmall
from hardyproj.kernels import (KernelSpec, fejer, kernel_coeff, kernel_eval, kernel_l1,
                               l1_bound, poisson, vdp)


def quad_coeff(K, k):
    """Oracle: adaptive quadrature of K(t) e^{-ikt} over one period."""
    re, _ = integrate.quad(lambda t: kernel_eval(K, t) * np.cos(k * t), -np.pi, np.pi,
                           limit=400, epsabs=1e-13)
    return re / (2 * np.pi)


class TestEval:
    def test_fejer_at_zero(self):
        assert kernel_eval(fejer(4), 0.0) == pytest.approx(4.0, abs=1e-12)

    def test_fejer_at_pi(self):
        assert kernel_eval(fejer(2), np.pi) == pytest.approx(0.0, abs=1e-15)

    def test_vdp_at_zero(self):
        assert kernel_eval(vdp(2, 2), 0.0) == pytest.approx(6.0, abs=1e-12)

    def test_near_zero_continuity(self):
        t = np.array([-2e-6, -1e-6, -5e-7, 0.0, 5e-7, 1e-6, 2e-6])
        v = kernel_eval(fejer(7), t)
        assert np.all(np.abs(v - 7) < 1e-8)

    def test_periodic(self):
        t = np.linspace(-3, 3, 11)
        np.testing.assert_allclose(kernel_eval(vdp(3, 3), t), kernel_eval(vdp(3, 3), t + 4 * np.pi),
                                   atol=1e-11)

    @pytest.mark.parametrize("n,r", [(1, 2), (3, 2), (4, 3), (7, 4)])
    def test_vdp_identity(self, n, r):
        t = np.linspace(-np.pi, np.pi, 1001)
        lhs = kernel_eval(vdp(n, r), t)
        rhs = (r * kernel_eval(fejer(r * n), t) - kernel_eval(fejer(n), t)) / (r - 1)
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_poisson_closed_form(self):
        t = np.linspace(-np.pi, np.pi, 17)
        k = np.arange(-200, 201)
        series = (0.5 ** np.abs(k))[None, :] * np.cos(np.outer(t, k))
        np.testing.assert_allclose(kernel_eval(poisson(0.5), t), series.sum(axis=1), atol=1e-12)


class TestCoefficients:
    def test_plateau_and_vanishing(self):
        assert kernel_coeff(vdp(5, 2), 3) == 1.0
        assert kernel_coeff(vdp(5, 2), 10) == 0.0

    def test_ramp_against_quadrature(self):
        assert kernel_coeff(vdp(2, 2), 3) == 0.5
        assert quad_coeff(vdp(2, 2), 3) == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("K", [fejer(1), fejer(5), vdp(3, 2), vdp(2, 4), poisson(0.3)])
    def test_against_quadrature(self, K):
        for k in range(0, 13):
            assert kernel_coeff(K, k) == pytest.approx(quad_coeff(K, k), abs=1e-10)

    def test_fejer_support_and_symmetry(self):
        k = np.arange(-20, 21)
        c = kernel_coeff(fejer(6), k)
        assert np.all(c[np.abs(k) >= 6] == 0)
        np.testing.assert_array_equal(c, c[::-1])
        np.testing.assert_array_equal(kernel_coeff(vdp(4, 3), k), kernel_coeff(vdp(4, 3), -k))

    def test_degree(self):
        assert fejer(5).degree == 4
        assert vdp(5, 3).degree == 14
        assert poisson(0.2).degree is None


class TestL1:
    def test_fejer_is_one(self):
        for n in (1, 3, 8, 20):
            assert kernel_l1(fejer(n)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("n,r", [(4, 2), (4, 3), (10, 2), (16, 4)])
    def test_vdp_bound(self, n, r):
        K = vdp(n, r)
        assert kernel_l1(K) <= l1_bound(K) + 1e-9
        assert l1_bound(vdp(4, 2)) == 3.0 and l1_bound(vdp(4, 3)) == 2.0

    def test_vdp_l1_against_quadrature(self):
        # oracle: split the period at the sign changes of K, integrate each piece
        K = vdp(3, 2)
        t = np.linspace(-np.pi, np.pi, 20001)
        v = kernel_eval(K, t)
        cross = np.flatnonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)
        zeros = [optimize.brentq(lambda x: kernel_eval(K, x), t[i], t[i + 1], xtol=1e-15)
                 for i in cross]
        pts = [-np.pi, *zeros, np.pi]
        oracle = sum(abs(integrate.quad(lambda x: kernel_eval(K, x), a, b, epsabs=1e-14)[0])
                     for a, b in zip(pts[:-1], pts[1:])) / (2 * np.pi)
        # |K| has corners at its zeros, so the grid rule converges like h^2
        errs = [abs(kernel_l1(K, s) - oracle) for s in (1 << 12, 1 << 14)]
        assert errs[1] < 1e-7
        assert errs[1] < errs[0] / 8

    def test_grid_too_small(self):
        with pytest.raises(GridTooSmall):
            kernel_l1(vdp(4, 2), 16)


def test_invalid_specs():
    with pytest.raises(ValueError):
        KernelSpec("dirichlet", 3)
    with pytest.raises(ValueError):
        vdp(3, 1)
    with pytest.raises(ValueError):
        poisson(1.0)
    with pytest.raises(ValueError):
        fejer(0)
