import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from hardyproj.errors import DimensionMismatch, GridTooSmall
from hardyproj.kernels import fejer, vdp, kernel_eval
from hardyproj.spaces import INF, SequenceSpace
from hardyproj.trigpoly import (VecTrigPoly, convolve, default_grid, dumps, evaluate,
                                grid_values, loads, lp_norm, random_analytic,
                                riesz_minus, riesz_plus)

S2 = SequenceSpace(2, 2)


def poly(rng, space, lo, hi):
    k = np.arange(lo, hi + 1)
    return VecTrigPoly(space, k, rng.standard_normal((k.size, space.dim))
                       + 1j * rng.standard_normal((k.size, space.dim)))


class TestConstruction:
    def test_merges_and_sorts(self):
        f = VecTrigPoly(S2, [3, -1, 3], [[1, 0], [0, 1], [2, 0]])
        assert list(f.freqs) == [-1, 3]
        np.testing.assert_array_equal(f.coeff(3), [3, 0])
        np.testing.assert_array_equal(f.coeff(7), [0, 0])

    def test_wrong_dimension(self):
        with pytest.raises(DimensionMismatch):
            VecTrigPoly(S2, [0], [[1, 2, 3]])

    def test_band_and_analytic(self):
        f = VecTrigPoly.from_dict(S2, {-2: [1, 0], 5: [0, 1]})
        assert (f.k_min, f.k_max, f.spread) == (-2, 5, 7)
        assert not f.analytic()
        assert riesz_plus(f).analytic()

    def test_from_samples_roundtrip(self, rng):
        f = poly(rng, S2, -5, 6)
        g = VecTrigPoly.from_samples(S2, grid_values(f, 16))
        assert g.pruned(1e-12).allclose(f, 1e-12)

    def test_serialisation_roundtrip(self, rng):
        for space in (S2, SequenceSpace(3, INF), SequenceSpace(1, 1.5)):
            f = poly(rng, space, -3, 4)
            g = loads(dumps(f))
            assert g.space == space
            np.testing.assert_array_equal(g.freqs, f.freqs)
            np.testing.assert_array_equal(g.coeffs, f.coeffs)


class TestEval:
    def test_examples(self):
        e1 = np.array([1.0, 0.0])
        c = VecTrigPoly.constant(S2, e1)
        z = VecTrigPoly.monomial(S2, 1, e1)
        np.testing.assert_allclose(evaluate(c, 1.234), e1)
        np.testing.assert_allclose(evaluate(z, 0.0), e1)
        np.testing.assert_allclose(evaluate(z, np.pi), -e1, atol=1e-15)

    def test_grid_values_match_direct(self, rng):
        f = poly(rng, S2, -40, 37)
        for s in (7, 64, 100):
            theta = 2 * np.pi * np.arange(s) / s
            np.testing.assert_allclose(grid_values(f, s), evaluate(f, theta), atol=1e-11)


class TestConvolve:
    def test_plateau_keeps_f(self, rng):
        f = poly(rng, S2, 0, 6)
        assert convolve(f, vdp(6, 2)).allclose(f, 0)

    def test_vanishing(self):
        f = VecTrigPoly.monomial(S2, 12, [1, 1])
        assert convolve(f, vdp(6, 2)).is_zero()

    def test_fejer_scaling_against_quadrature(self):
        f = VecTrigPoly.monomial(SequenceSpace(1, 2), 2, [1.0])
        g = convolve(f, fejer(4))
        s = 1 << 14
        t = 2 * np.pi * np.arange(s) / s
        oracle = np.mean(kernel_eval(fejer(4), t) * np.exp(-2j * t))
        assert g.coeff(2)[0] == pytest.approx(oracle, abs=1e-12)
        assert g.coeff(2)[0] == pytest.approx(0.5)

    def test_linear_and_commutes_with_riesz(self, rng):
        f, g = poly(rng, S2, -9, 9), poly(rng, S2, -4, 12)
        K = vdp(3, 2)
        assert convolve(f + 2j * g, K).allclose(convolve(f, K) + 2j * convolve(g, K), 1e-12)
        assert convolve(riesz_minus(f), K).allclose(riesz_minus(convolve(f, K)), 1e-12)


class TestRiesz:
    def test_split(self):
        e1 = np.array([1.0, 0.0])
        f = VecTrigPoly.from_dict(S2, {1: e1, -1: e1})
        assert riesz_minus(f).allclose(VecTrigPoly.monomial(S2, -1, e1), 0)

    def test_analytic_and_constant(self, rng):
        assert riesz_minus(poly(rng, S2, 0, 5)).is_zero()
        assert riesz_minus(VecTrigPoly.constant(S2, [1, 2])).is_zero()

    def test_reconstruction(self, rng):
        f = poly(rng, S2, -8, 8)
        back = riesz_minus(f) + riesz_plus(f)
        np.testing.assert_array_equal(back.freqs, f.freqs)
        np.testing.assert_array_equal(back.coeffs, f.coeffs)


class TestLpNorm:
    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0, INF])
    def test_lacunary_pair(self, p):
        f = VecTrigPoly.from_dict(SequenceSpace(2, p), {3: [1, 0], 9: [0, 1]})
        expected = 2 ** (0 if p == INF else 1 / p)
        assert lp_norm(f, 1) == pytest.approx(expected, abs=1e-12)

    def test_constant(self):
        x = np.array([3.0, -4j])
        f = VecTrigPoly.constant(S2, x)
        for e in (0.5, 1, 2, 3, INF):
            assert lp_norm(f, e) == pytest.approx(5.0)

    def test_four_over_pi(self):
        f = VecTrigPoly.from_dict(SequenceSpace(1, 2), {0: [1], 1: [1]})
        oracle, _ = integrate.quad(lambda t: 2 * abs(math.cos(t / 2)), 0, 2 * math.pi)
        assert lp_norm(f, 1, 1 << 12) == pytest.approx(oracle / (2 * math.pi), abs=1e-6)
        assert oracle / (2 * math.pi) == pytest.approx(4 / math.pi)

    def test_sup_refinement(self):
        f = VecTrigPoly.from_dict(SequenceSpace(1, 2), {0: [1], 1: [1]})
        assert lp_norm(f, INF, 9) == pytest.approx(2.0, abs=1e-12)
        g = VecTrigPoly.from_dict(SequenceSpace(1, 2), {0: [1], 1: [np.exp(0.123j)]})
        assert lp_norm(g, INF, 9) == pytest.approx(2.0, abs=1e-12)

    def test_grid_too_small(self):
        f = VecTrigPoly.from_dict(S2, {0: [1, 0], 10: [0, 1]})
        with pytest.raises(GridTooSmall):
            lp_norm(f, 1, 20)

    def test_default_grid(self):
        f = VecTrigPoly.from_dict(S2, {-2: [1, 0], 5: [0, 1]})
        assert default_grid(f) == 64

    def test_doubling_stable_for_linear_functionals(self, rng):
        # <f, x*> is a scalar polynomial; its mean is exact once s > 2 max|k|
        f = poly(rng, S2, -6, 6)
        xs = np.array([0.3 - 1j, 2.0])
        h = VecTrigPoly(SequenceSpace(1, 1), f.freqs, (f.coeffs @ xs)[:, None])
        vals = [np.mean(grid_values(h, s)[:, 0]) for s in (13, 26, 52)]
        assert abs(vals[0] - vals[1]) < 1e-10 and abs(vals[1] - vals[2]) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([1.0, 2.0, INF]), st.integers(0, 10))
def test_property_norm_homogeneous_and_subadditive(seed, p, deg):
    rng = np.random.default_rng(seed)
    space = SequenceSpace(3, p)
    f, g = random_analytic(rng, space, deg), random_analytic(rng, space, deg)
    s = 4 * (deg + 1) + 1
    c = complex(rng.standard_normal(), rng.standard_normal())
    assert lp_norm(c * f, 1, s) == pytest.approx(abs(c) * lp_norm(f, 1, s), rel=1e-10)
    assert lp_norm(f + g, 1, s) <= lp_norm(f, 1, s) + lp_norm(g, 1, s) + 1e-12
