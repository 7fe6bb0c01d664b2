import math
from fractions import Fraction

import numpy as np
import pytest

from hardyproj.errors import DimensionMismatch, GridTooSmall, PreconditionError
from hardyproj.extension import (OperatorSymbol, eta_lower_certificate, eta_upper, extend_min,
                                 h1_op_norm_lower, l1_op_norm, lacunary_test_function,
                                 paley_bound, paley_symbol, pairing, tensor_norm_bounds)
from hardyproj.spaces import INF, SequenceSpace
from hardyproj.trigpoly import VecTrigPoly, lp_norm, random_analytic

C1 = SequenceSpace(1, 1)


class TestSymbols:
    def test_analytic_flag(self):
        with pytest.raises(PreconditionError):
            OperatorSymbol(C1, VecTrigPoly.monomial(C1, -1, [1]), analytic=True)
        u = OperatorSymbol.from_dict(C1, {-1: [1], 2: [1]})
        assert not u.analytic

    def test_apply(self):
        u = paley_symbol(2, SequenceSpace(2, 2))
        np.testing.assert_allclose(u.apply({3: 2.0, 9: -1j, 4: 7.0}), [2.0, -1j])

    def test_paley_support(self):
        assert list(paley_symbol(1, SequenceSpace(1, 2)).support) == [3]
        assert list(paley_symbol(2, SequenceSpace(2, 2)).support) == [3, 9]
        with pytest.raises(DimensionMismatch):
            paley_symbol(3, SequenceSpace(2, 2))

    def test_pairing_exact(self):
        u = paley_symbol(3, SequenceSpace(3, 2))
        pr = pairing(u, lacunary_test_function(3, 2))
        assert isinstance(pr, Fraction) and pr == 3

    def test_pairing_is_bilinear(self, rng):
        X = SequenceSpace(2, 2)
        u = OperatorSymbol(X, random_analytic(rng, X, 4))
        f, g = random_analytic(rng, X, 4), random_analytic(rng, X, 4)
        assert pairing(u, f + 2j * g) == pytest.approx(pairing(u, f) + 2j * pairing(u, g))


class TestL1OpNorm:
    def test_examples(self):
        assert l1_op_norm(OperatorSymbol.from_dict(SequenceSpace(2, 2), {0: [1, 0]})) == 1.0
        assert l1_op_norm(paley_symbol(2, SequenceSpace(2, 2))) == pytest.approx(math.sqrt(2))
        assert l1_op_norm(OperatorSymbol.from_dict(C1, {0: [1], 1: [1]})) == pytest.approx(2.0)

    def test_zero_and_grid(self):
        assert l1_op_norm(OperatorSymbol(C1, VecTrigPoly.zero(C1))) == 0.0
        with pytest.raises(GridTooSmall):
            l1_op_norm(OperatorSymbol.from_dict(C1, {0: [1], 5: [1]}), 16)

    def test_dominates_h1_lower(self, rng):
        for _ in range(5):
            X = SequenceSpace(2, float(rng.choice([1.0, 2.0, INF])))
            u = OperatorSymbol(X, random_analytic(rng, X, 5))
            assert h1_op_norm_lower(u, 200) <= l1_op_norm(u) * (1 + 1e-9)


class TestH1Lower:
    def test_constant_symbol(self):
        u = OperatorSymbol.from_dict(SequenceSpace(2, 2), {0: [1, 0]})
        val, where = h1_op_norm_lower(u, 50, return_details=True)
        assert val >= 1.0 - 1e-15

    def test_zero(self):
        assert h1_op_norm_lower(OperatorSymbol(C1, VecTrigPoly.zero(C1))) == 0.0

    def test_requires_analytic(self):
        with pytest.raises(PreconditionError):
            h1_op_norm_lower(OperatorSymbol.from_dict(C1, {-1: [1]}))

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_paley_below_two(self, n):
        val = h1_op_norm_lower(paley_symbol(n, SequenceSpace(n, 2)), 1000, seed=n)
        assert 1.0 <= val <= 2.0


class TestExtendMin:
    def test_constant_symbol(self):
        u = OperatorSymbol.from_dict(SequenceSpace(2, 2), {0: [3, 4]})
        res = extend_min(u, 2)
        assert abs(res.objective - 5.0) <= 1e-7
        assert res.objective <= res.zero_completion

    def test_scalar_monomial_against_disc_search(self):
        u = OperatorSymbol.from_dict(C1, {1: [1.0]})
        res = extend_min(u, 1)
        # oracle: sup over theta of |e^{i t} + z e^{-i t}| on a grid of the disc |z| <= 1
        t = np.linspace(0, 2 * np.pi, 257)
        xs = np.linspace(-1, 1, 81)
        z = (xs[:, None] + 1j * xs[None, :]).ravel()
        z = z[np.abs(z) <= 1]
        sup = np.abs(np.exp(1j * t)[None, :] + z[:, None] * np.exp(-1j * t)[None, :]).max(axis=1)
        assert sup.min() == pytest.approx(1.0, abs=1e-12)
        assert res.objective == pytest.approx(sup.min(), abs=1e-7)

    def test_history_monotone(self, rng):
        X = SequenceSpace(2, 2)
        u = OperatorSymbol(X, random_analytic(rng, X, 3))
        res = extend_min(u, 3, max_iter=60)
        assert all(b <= a for a, b in zip(res.history, res.history[1:]))
        assert res.objective <= res.zero_completion
        assert res.lower_bound <= res.objective + 1e-9

    def test_lower_bound_against_known_optimum(self):
        # y_0 = y_1 = 1: the optimum over a negative band stays at least the
        # H^1 -> C norm of the symbol, which is at least 1
        u = OperatorSymbol.from_dict(C1, {0: [1.0], 1: [1.0]})
        res = extend_min(u, 2)
        assert res.h1_lower <= res.objective + 1e-9
        assert res.objective < res.zero_completion

    def test_paley_three(self):
        u = paley_symbol(3, SequenceSpace(3, 2))
        res = extend_min(u, 9)
        assert res.objective <= math.sqrt(3) + 1e-12
        assert math.isfinite(res.lambda_est)

    def test_bad_arguments(self):
        u = OperatorSymbol.from_dict(C1, {1: [1.0]})
        with pytest.raises(ValueError):
            extend_min(u, 0)
        with pytest.raises(GridTooSmall):
            extend_min(u, 2, grid_size=8)


class TestEta:
    @pytest.mark.parametrize("n,p,expected", [(4, 1, 0.5), (4, 2, 1.0), (9, INF, 1.5)])
    def test_lower_examples(self, n, p, expected):
        assert eta_lower_certificate(n, p).eta_lower == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("n,p,expected", [(5, 1, 1.0), (4, 2, 2.0), (9, INF, 3.0)])
    def test_upper_examples(self, n, p, expected):
        assert eta_upper(n, p) == pytest.approx(expected)

    def test_components(self):
        cert = eta_lower_certificate(5, 1.5)
        assert cert.pairing == 5
        assert cert.f_norm == pytest.approx(5 ** (1 / 1.5), abs=1e-9)
        assert cert.u_bound == paley_bound(5, 3.0)
        assert cert.eta_lower == pytest.approx(cert.pairing / (cert.u_bound * cert.f_norm))

    @pytest.mark.parametrize("p", [1, "3/2", 2, 4, INF])
    def test_sandwich_up_to_twelve(self, p):
        for n in range(1, 13):
            grid = None if n <= 8 else 1 << math.ceil(math.log2(2 * 3 ** n + 2))
            cert = eta_lower_certificate(n, p, grid)
            assert cert.eta_lower <= eta_upper(n, p) * (1 + 1e-9)


class TestTensorBounds:
    def test_lacunary_l1(self):
        F = VecTrigPoly.from_dict(SequenceSpace(2, 1), {1: [1, 0], 2: [0, 1]})
        tb = tensor_norm_bounds(F)
        assert tb.lower == pytest.approx(2.0, abs=1e-9)
        assert tb.upper == pytest.approx(2.0, abs=1e-9)

    def test_rank_one(self, rng):
        h = random_analytic(rng, SequenceSpace(1, 2), 5)
        x = np.array([1.0, -2j, 0.5])
        F = VecTrigPoly(SequenceSpace(3, 2), h.freqs, h.coeffs * x[None, :])
        tb = tensor_norm_bounds(F)
        bound = lp_norm(h, 1, 1 << 12) * np.linalg.norm(x)
        assert tb.upper <= bound * (1 + 1e-9)
        assert tb.lower <= tb.upper * (1 + 1e-9)

    def test_zero(self):
        assert tensor_norm_bounds(VecTrigPoly.zero(SequenceSpace(2, 2))).upper == 0.0

    def test_lower_le_upper(self, rng):
        for p in (1.0, 1.5, 2.0, INF):
            F = random_analytic(rng, SequenceSpace(3, p), 6)
            tb = tensor_norm_bounds(F)
            assert tb.lower <= tb.upper * (1 + 1e-9)
            assert tb.lower >= tb.l1_norm * (1 - 1e-12)

    def test_scalar_like_reaches_l1(self, rng):
        h = random_analytic(rng, SequenceSpace(1, 2), 4)
        F = VecTrigPoly(SequenceSpace(2, 2), h.freqs, np.column_stack([h.coeffs[:, 0], 0 * h.coeffs[:, 0]]))
        tb = tensor_norm_bounds(F)
        assert tb.upper == pytest.approx(tb.l1_norm, rel=1e-9)
