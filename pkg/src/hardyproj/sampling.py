"""Roots-of-unity grids and the sampling inequalities for analytic
polynomials.

For a polynomial of degree <= n the mean of ||f|| over the s-th roots of
unity is comparable to the integral of ||f|| once s is a fixed multiple of
n; :func:`lemma52_bounds` and :func:`prop53_bounds` check the two-sided
constants, :func:`exact_mean_check` the exact vector identity behind them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import GridTooSmall, PreconditionError
from .trigpoly import VecTrigPoly, grid_values, pointwise_norms

EXACT_TOL = 1e-10
REFERENCE_FACTOR = 16


@dataclass(frozen=True)
class SampleGrid:
    s: int

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("grid size must be positive")

    @property
    def points(self):
        return 2 * np.pi * np.arange(self.s) / self.s

    @property
    def roots(self):
        return np.exp(1j * self.points)


def roots_grid(s: int) -> SampleGrid:
    return SampleGrid(int(s))


def b_grid(n: int) -> SampleGrid:
    """B_n = A_{12n}."""
    return SampleGrid(12 * int(n))


def discrete_mean(f: VecTrigPoly, grid: SampleGrid) -> float:
    """(1/s) sum over the grid of ||f(omega)||_X, compensated summation."""
    return math.fsum(pointwise_norms(f, grid.s)) / grid.s


@dataclass(frozen=True)
class MeanCheck:
    mean: np.ndarray
    coeff0: np.ndarray
    residual: float
    precondition_ok: bool
    passed: bool


def exact_mean_check(g: VecTrigPoly, s: int) -> MeanCheck:
    """Compare the grid mean of g (a vector) with its 0-th coefficient.

    The identity holds for band [-m, m] whenever s > m.  With s <= m the
    check still runs so aliasing can be exhibited, but it never passes.
    """
    s = int(s)
    m = g.degree
    vals = grid_values(g, s)
    mean = np.array([math.fsum(vals[:, j].real) + 1j * math.fsum(vals[:, j].imag)
                     for j in range(g.space.dim)]) / s
    c0 = g.coeff(0)
    res = float(np.linalg.norm(mean - c0))
    ok = s > m
    return MeanCheck(mean, c0, res, ok, ok and res <= EXACT_TOL)


def bracket(eps) -> int:
    """Integer part of 2/eps, computed exactly."""
    e = eps if isinstance(eps, Fraction) else Fraction(str(eps))
    if not 0 < e < 1:
        raise ValueError("eps must lie in (0, 1)")
    return math.floor(Fraction(2) / e)


def lemma52_s_min(n: int, eps) -> int:
    return (1 + bracket(eps)) * int(n)


def reference_integral(f: VecTrigPoly, s: int) -> float:
    """Dense-grid stand-in for the integral of ||f||."""
    return discrete_mean(f, SampleGrid(s))


@dataclass(frozen=True)
class Lemma52Result:
    s_min: int
    mean: float
    reference: float
    lower_factor: float
    upper_factor: float
    lower_ok: bool
    upper_ok: bool

    @property
    def passed(self) -> bool:
        return self.lower_ok and self.upper_ok


def _sandwich(mean, ref, lo, hi, rel=1e-12):
    slack = rel * max(abs(ref), abs(mean))
    return lo * ref <= mean + slack, mean <= hi * ref + slack


def lemma52_bounds(f: VecTrigPoly, n: int, eps) -> Lemma52Result:
    """Check (1-eps) I <= grid mean <= I/(1-eps) at s = (1 + [2/eps]) n."""
    if not f.analytic():
        raise PreconditionError("lemma52_bounds needs an analytic polynomial")
    if f.degree > n:
        raise PreconditionError(f"degree {f.degree} exceeds n = {n}")
    e = float(Fraction(str(eps)) if not isinstance(eps, Fraction) else eps)
    s = lemma52_s_min(n, eps)
    mean = discrete_mean(f, SampleGrid(s))
    ref = reference_integral(f, REFERENCE_FACTOR * s)
    lo, hi = 1 - e, 1 / (1 - e)
    lower_ok, upper_ok = _sandwich(mean, ref, lo, hi)
    return Lemma52Result(s, mean, ref, lo, hi, lower_ok, upper_ok)


@dataclass(frozen=True)
class Prop53Result:
    ratio_low: float
    ratio_high: float
    mean: float
    reference: float
    passed: bool


def prop53_bounds(h: VecTrigPoly, n: int, reference_grid: int | None = None) -> Prop53Result:
    """Check (1/3) I <= mean over B_n <= 3 I for h of degree <= 3n.

    ``ratio_low`` is mean/I and ``ratio_high`` is I/mean; both lie in
    [1/3, 3] exactly when the sandwich holds.
    """
    if not h.analytic():
        raise PreconditionError("prop53_bounds needs an analytic polynomial")
    if h.degree > 3 * n:
        raise PreconditionError(f"degree {h.degree} exceeds 3n = {3 * n}")
    grid = b_grid(n)
    s_ref = REFERENCE_FACTOR * grid.s if reference_grid is None else int(reference_grid)
    if s_ref <= 2 * h.degree:
        raise GridTooSmall("reference grid too small")
    mean = discrete_mean(h, grid)
    ref = reference_integral(h, s_ref)
    if ref == 0:
        return Prop53Result(1.0, 1.0, mean, ref, mean == 0)
    lower_ok, upper_ok = _sandwich(mean, ref, 1 / 3, 3)
    return Prop53Result(mean / ref, ref / mean if mean else math.inf, mean, ref,
                        lower_ok and upper_ok)
