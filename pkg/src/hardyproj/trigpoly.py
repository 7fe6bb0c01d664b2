"""Vector-valued trigonometric polynomials on the circle.

A :class:`VecTrigPoly` stores a sorted array of integer frequencies and one
coefficient vector per frequency, so very sparse polynomials with large
frequencies (lacunary or substituted ones) stay cheap.  Evaluation on the
grid of s-th roots of unity folds frequencies mod s and uses one FFT, which
is exact for any s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, GridTooSmall
from .kernels import KernelSpec, kernel_coeff
from .spaces import INF, SequenceSpace, pnorm

_GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True, eq=False)
class VecTrigPoly:
    space: SequenceSpace
    freqs: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        f = np.asarray(self.freqs, dtype=np.int64).reshape(-1)
        c = np.asarray(self.coeffs, dtype=complex).reshape(f.shape[0], -1) if f.size else \
            np.zeros((0, self.space.dim), complex)
        if c.shape[1] != self.space.dim:
            raise DimensionMismatch(f"coefficient vectors of length {c.shape[1]} for {self.space}")
        order = np.argsort(f, kind="stable")
        f, c = f[order], c[order]
        if f.size and np.any(np.diff(f) == 0):
            # merge repeated frequencies
            uniq, inv = np.unique(f, return_inverse=True)
            merged = np.zeros((uniq.size, c.shape[1]), complex)
            np.add.at(merged, inv, c)
            f, c = uniq, merged
        f.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "freqs", f)
        object.__setattr__(self, "coeffs", c)

    # construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, space: SequenceSpace, coeffs: dict) -> "VecTrigPoly":
        keys = sorted(coeffs)
        vals = [np.asarray(coeffs[k], dtype=complex).reshape(space.dim) for k in keys]
        return cls(space, np.array(keys, dtype=np.int64),
                   np.array(vals).reshape(len(keys), space.dim))

    @classmethod
    def zero(cls, space: SequenceSpace) -> "VecTrigPoly":
        return cls(space, np.zeros(0, np.int64), np.zeros((0, space.dim)))

    @classmethod
    def constant(cls, space: SequenceSpace, x) -> "VecTrigPoly":
        return cls.from_dict(space, {0: x})

    @classmethod
    def monomial(cls, space: SequenceSpace, k: int, x) -> "VecTrigPoly":
        return cls.from_dict(space, {int(k): x})

    @classmethod
    def from_samples(cls, space: SequenceSpace, values) -> "VecTrigPoly":
        """Trigonometric interpolant of values on the s-th roots of unity.

        Frequencies are taken in [-(s//2), s - s//2 - 1].
        """
        values = np.asarray(values, dtype=complex)
        s = values.shape[0]
        c = np.fft.fft(values, axis=0) / s
        k = np.fft.fftfreq(s, 1.0 / s).astype(np.int64)
        return cls(space, k, c).pruned()

    # views ------------------------------------------------------------

    def to_dict(self) -> dict:
        return {int(k): self.coeffs[i].copy() for i, k in enumerate(self.freqs)}

    def coeff(self, k: int):
        i = np.searchsorted(self.freqs, k)
        if i < self.freqs.size and self.freqs[i] == k:
            return self.coeffs[i].copy()
        return np.zeros(self.space.dim, complex)

    def pruned(self, tol: float = 0.0) -> "VecTrigPoly":
        keep = np.abs(self.coeffs).max(axis=1, initial=0.0) > tol
        return VecTrigPoly(self.space, self.freqs[keep], self.coeffs[keep])

    @property
    def support(self) -> np.ndarray:
        return self.pruned().freqs

    @property
    def k_min(self) -> int:
        s = self.support
        return int(s[0]) if s.size else 0

    @property
    def k_max(self) -> int:
        s = self.support
        return int(s[-1]) if s.size else 0

    @property
    def spread(self) -> int:
        """k_max - k_min; the norm |f(theta)| only depends on this width."""
        return self.k_max - self.k_min

    @property
    def degree(self) -> int:
        s = self.support
        return int(np.abs(s).max()) if s.size else 0

    def analytic(self) -> bool:
        return self.k_min >= 0

    def is_zero(self) -> bool:
        return self.support.size == 0

    # algebra ----------------------------------------------------------

    def __add__(self, other: "VecTrigPoly") -> "VecTrigPoly":
        self._check_space(other)
        return VecTrigPoly(self.space, np.concatenate([self.freqs, other.freqs]),
                           np.concatenate([self.coeffs, other.coeffs]))

    def __neg__(self):
        return VecTrigPoly(self.space, self.freqs, -self.coeffs)

    def __sub__(self, other: "VecTrigPoly") -> "VecTrigPoly":
        return self + (-other)

    def __mul__(self, c):
        return VecTrigPoly(self.space, self.freqs, self.coeffs * c)

    __rmul__ = __mul__

    def shift(self, j: int) -> "VecTrigPoly":
        """Multiply by e^{ij theta}."""
        return VecTrigPoly(self.space, self.freqs + j, self.coeffs)

    def rotate(self, phi: float) -> "VecTrigPoly":
        """theta -> f(theta + phi)."""
        return VecTrigPoly(self.space, self.freqs,
                           self.coeffs * np.exp(1j * self.freqs * phi)[:, None])

    def map_coeffs(self, matrix, space: SequenceSpace) -> "VecTrigPoly":
        """Apply a linear map coefficientwise (matrix acts on column vectors)."""
        return VecTrigPoly(space, self.freqs, self.coeffs @ np.asarray(matrix).T)

    def allclose(self, other: "VecTrigPoly", atol: float = 1e-12) -> bool:
        d = (self - other)
        return bool(np.abs(d.coeffs).max(initial=0.0) <= atol)

    def _check_space(self, other):
        if other.space.dim != self.space.dim:
            raise DimensionMismatch(f"{self.space} vs {other.space}")

    # evaluation -------------------------------------------------------

    def eval(self, theta):
        return evaluate(self, theta)

    def on_grid(self, s: int):
        return grid_values(self, s)


def evaluate(f: VecTrigPoly, theta):
    """f(theta) for scalar or array ``theta``; returns shape (..., dim)."""
    theta = np.asarray(theta, dtype=float)
    ph = np.exp(1j * np.multiply.outer(theta, f.freqs.astype(float)))
    return ph @ f.coeffs


def grid_values(f: VecTrigPoly, s: int):
    """Values at the points 2 pi j / s, j = 0..s-1, shape (s, dim)."""
    s = int(s)
    folded = np.zeros((s, f.space.dim), complex)
    np.add.at(folded, np.mod(f.freqs, s), f.coeffs)
    return np.fft.ifft(folded, axis=0) * s


def convolve(f: VecTrigPoly, K: KernelSpec) -> VecTrigPoly:
    """f * K, i.e. coefficient k multiplied by the kernel's k-th coefficient."""
    w = np.atleast_1d(kernel_coeff(K, f.freqs))
    return VecTrigPoly(f.space, f.freqs, f.coeffs * w[:, None]).pruned()


def riesz_minus(f: VecTrigPoly) -> VecTrigPoly:
    """Strictly negative frequencies of f."""
    keep = f.freqs < 0
    return VecTrigPoly(f.space, f.freqs[keep], f.coeffs[keep]).pruned()


def riesz_plus(f: VecTrigPoly) -> VecTrigPoly:
    """f - riesz_minus(f); frequency 0 stays in the analytic part."""
    keep = f.freqs >= 0
    return VecTrigPoly(f.space, f.freqs[keep], f.coeffs[keep]).pruned()


def default_grid(f: VecTrigPoly) -> int:
    """Smallest power of two >= 8 (spread + 1)."""
    return 1 << max(0, math.ceil(math.log2(8 * (f.spread + 1))))


def pointwise_norms(f: VecTrigPoly, s: int):
    return pnorm(grid_values(f, s), f.space.p)


def _refine_max(f: VecTrigPoly, s: int, norms) -> float:
    """Golden-section search on the two cells around each local grid max."""
    p = f.space.p
    best = float(norms.max(initial=0.0))
    if f.spread == 0 or best == 0:
        return best
    h = 2 * np.pi / s
    # refine a handful of the largest cells
    order = np.argsort(norms)[::-1][:4]

    def val(t):
        return float(pnorm(evaluate(f, t), p))

    for j in order:
        t0 = j * h
        for a, b in ((t0 - h, t0), (t0, t0 + h)):
            c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
            fc, fd = val(c), val(d)
            for _ in range(60):
                if b - a < 1e-13:
                    break
                if fc > fd:
                    b, d, fd = d, c, fc
                    c = b - _GOLDEN * (b - a)
                    fc = val(c)
                else:
                    a, c, fc = c, d, fd
                    d = a + _GOLDEN * (b - a)
                    fd = val(d)
            best = max(best, fc, fd)
    return best


def lp_norm(f: VecTrigPoly, exponent=1.0, grid_size: int | None = None) -> float:
    """Boundary L^exponent(T; X) norm of f by roots-of-unity quadrature.

    Parameters
    ----------
    f : VecTrigPoly
    exponent : float
        Outer exponent in (0, inf]; the inner norm is that of ``f.space``.
    grid_size : int, optional
        Number of nodes; defaults to :func:`default_grid`.  Must be at least
        ``2 * spread + 1``.
    """
    exponent = float(exponent)
    if not exponent > 0:
        raise ValueError("exponent must be positive")
    need = 2 * f.spread + 1
    s = default_grid(f) if grid_size is None else int(grid_size)
    if s < need:
        raise GridTooSmall(f"grid of {s} points below 2*spread+1 = {need}")
    norms = pointwise_norms(f, s)
    if exponent == INF:
        return _refine_max(f, s, norms)
    if exponent == 1:
        return math.fsum(norms) / s
    m = norms.max(initial=0.0)
    if m == 0:
        return 0.0
    return float(m * (math.fsum((norms / m) ** exponent) / s) ** (1 / exponent))


# serialisation --------------------------------------------------------

def dumps(f: VecTrigPoly) -> str:
    """Text record: header ``space n p`` then ``k re_1 im_1 ... re_d im_d``."""
    p = "inf" if f.space.p == INF else repr(f.space.p)
    lines = [f"space {f.space.dim} {p}"]
    for k, c in zip(f.freqs, f.coeffs):
        parts = [str(int(k))]
        for z in c:
            parts += [repr(float(z.real)), repr(float(z.imag))]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def loads(text: str) -> VecTrigPoly:
    rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    head = rows[0]
    if head[0] != "space" or len(head) != 3:
        raise ValueError("first line must be 'space n p'")
    space = SequenceSpace(int(head[1]), head[2])
    coeffs = {}
    for r in rows[1:]:
        if len(r) != 1 + 2 * space.dim:
            raise DimensionMismatch(f"line {' '.join(r)!r} has wrong length")
        v = np.array([float(x) for x in r[1:]])
        coeffs[int(r[0])] = v[0::2] + 1j * v[1::2]
    return VecTrigPoly.from_dict(space, coeffs)


def random_analytic(rng: np.random.Generator, space: SequenceSpace, degree: int,
                    density: float = 1.0) -> VecTrigPoly:
    """Complex-Gaussian coefficients on frequencies 0..degree."""
    k = np.arange(degree + 1)
    c = rng.standard_normal((k.size, space.dim)) + 1j * rng.standard_normal((k.size, space.dim))
    if density < 1:
        c *= (rng.random(k.size) < density)[:, None]
    return VecTrigPoly(space, k, c)
