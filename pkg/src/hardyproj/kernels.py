"""Fejer, de la Vallee-Poussin and Poisson kernels on the circle.

The coefficient view (:func:`kernel_coeff`) is what convolution uses; the
closed forms exist for pointwise evaluation and for L^1 quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooSmall

_NEAR_ZERO = 1e-6


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    n: int = 1
    r: int = 2
    rho: float = 0.0

    def __post_init__(self):
        if self.kind not in ("fejer", "vdp", "poisson"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind in ("fejer", "vdp") and self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == "vdp" and (int(self.r) != self.r or self.r < 2):
            raise ValueError("r must be an integer >= 2")
        if self.kind == "poisson" and not 0 <= self.rho < 1:
            raise ValueError("Poisson radius must lie in [0, 1)")

    @property
    def degree(self):
        """Largest |k| with a nonzero coefficient (None for Poisson)."""
        if self.kind == "fejer":
            return self.n - 1
        if self.kind == "vdp":
            return self.r * self.n - 1
        return None

    def __str__(self):
        if self.kind == "fejer":
            return f"Fejer({self.n})"
        if self.kind == "vdp":
            return f"VdP({self.n},{self.r})"
        return f"Poisson({self.rho:g})"


def fejer(n: int) -> KernelSpec:
    return KernelSpec("fejer", n=n)


def vdp(n: int, r: int = 2) -> KernelSpec:
    return KernelSpec("vdp", n=n, r=r)


def poisson(rho: float) -> KernelSpec:
    return KernelSpec("poisson", rho=rho)


def _wrap(theta):
    # reduce to (-pi, pi] so the removable singularity sits only at 0
    return np.pi - np.mod(np.pi - np.asarray(theta, dtype=float), 2 * np.pi)


def _fejer_eval(n, theta):
    t = _wrap(theta)
    out = np.empty_like(t)
    near = np.abs(t) < _NEAR_ZERO
    far = ~near
    s = np.sin(n * t[far] / 2) / np.sin(t[far] / 2)
    out[far] = s * s / n
    if near.any():
        k = np.arange(1, n)
        w = 1 - k / n
        out[near] = 1 + 2 * (np.cos(np.outer(t[near], k)) @ w)
    return out


def kernel_eval(K: KernelSpec, theta):
    """Pointwise value of the kernel (vectorised over ``theta``)."""
    theta = np.asarray(theta, dtype=float)
    scalar = theta.ndim == 0
    t = np.atleast_1d(theta)
    if K.kind == "fejer":
        out = _fejer_eval(K.n, t)
    elif K.kind == "vdp":
        out = (K.r * _fejer_eval(K.r * K.n, t) - _fejer_eval(K.n, t)) / (K.r - 1)
    else:
        rho = K.rho
        out = (1 - rho * rho) / (1 - 2 * rho * np.cos(t) + rho * rho)
    return float(out[0]) if scalar else out


def kernel_coeff(K: KernelSpec, k):
    """Fourier coefficient(s) of the kernel at integer frequency ``k``."""
    a = np.abs(np.asarray(k, dtype=float))
    if K.kind == "fejer":
        out = np.maximum(0.0, 1 - a / K.n)
    elif K.kind == "vdp":
        n, r = K.n, K.r
        out = np.clip((r - a / n) / (r - 1), 0.0, 1.0)
    else:
        out = K.rho ** a
    return float(out) if out.ndim == 0 else out


def kernel_l1(K: KernelSpec, grid_size: int | None = None) -> float:
    """Roots-of-unity quadrature of the integral of |K| (normalised measure)."""
    if K.kind == "poisson":
        need = 64
    else:
        need = 4 * (K.r if K.kind == "vdp" else 1) * K.n
    if grid_size is None:
        grid_size = need
    if grid_size < need:
        raise GridTooSmall(f"{K} needs a grid of at least {need} points, got {grid_size}")
    theta = 2 * np.pi * np.arange(grid_size) / grid_size
    return float(np.abs(kernel_eval(K, theta)).mean())


def l1_bound(K: KernelSpec) -> float:
    """Classical upper bound for the L^1 norm: 1, or (r+1)/(r-1) for VdP."""
    if K.kind == "vdp":
        return (K.r + 1) / (K.r - 1)
    return 1.0
