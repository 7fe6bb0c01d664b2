"""Finite-dimensional complex sequence spaces l^n_p, l^1 quotients and
Banach-Mazur witnesses."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionMismatch, PreconditionError

INF = math.inf

LP_TOL = 1e-9


def parse_exponent(p) -> float:
    """Accept ints, floats, fractions and the strings ``"inf"``/``"oo"``."""
    if isinstance(p, str):
        s = p.strip().lower()
        if s in ("inf", "infinity", "oo", "∞"):
            return INF
        if "/" in s:
            num, den = s.split("/")
            return float(num) / float(den)
        return float(s)
    return float(p)


def dual_exponent(p: float) -> float:
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def pnorm(x, p: float, axis: int = -1):
    """l_p norm along ``axis``; ``p`` may be any positive real or ``inf``.

    For ``0 < p < 1`` this is the quasi-norm ``(sum |x_j|^p)^(1/p)``.
    """
    a = np.abs(np.asarray(x))
    if p == INF:
        return a.max(axis=axis, initial=0.0)
    if p == 1:
        return a.sum(axis=axis)
    if p == 2:
        return np.sqrt((a * a).sum(axis=axis))
    # scale by the max to keep p-th powers in range
    m = a.max(axis=axis, keepdims=True, initial=0.0)
    safe = np.where(m > 0, m, 1.0)
    return np.squeeze(safe, axis=axis) * ((a / safe) ** p).sum(axis=axis) ** (1.0 / p)


def dual_vector(x, p: float):
    """Return phi with ||phi||_q <= 1 and Re sum conj(phi_j) x_j = ||x||_p.

    Works on the last axis; zero rows map to zero.
    """
    x = np.asarray(x, dtype=complex)
    a = np.abs(x)
    phase = np.where(a > 0, x / np.where(a > 0, a, 1.0), 0.0)
    if p == 1:
        return phase
    if p == INF:
        m = a.max(axis=-1, keepdims=True)
        hit = (a >= m * (1 - 1e-12)) & (m > 0)
        w = hit / np.maximum(hit.sum(axis=-1, keepdims=True), 1)
        return phase * w
    nrm = pnorm(x, p)[..., None]
    safe = np.where(nrm > 0, nrm, 1.0)
    return phase * (a / safe) ** (p - 1)


@dataclass(frozen=True)
class SequenceSpace:
    """The complex space l^n_p.

    ``p`` is stored as a float; ``math.inf`` is the tag for the sup norm and
    is never raised to a power.
    """

    dim: int
    p: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "p", parse_exponent(self.p))
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        if not self.p >= 1:
            raise ValueError(f"exponent must lie in [1, inf], got {self.p}")

    @property
    def q(self) -> float:
        return dual_exponent(self.p)

    @property
    def r(self) -> float:
        """min(2, p), the type exponent appearing in the distance to l^n_1."""
        return min(2.0, self.p)

    def dual(self) -> "SequenceSpace":
        return SequenceSpace(self.dim, self.q)

    def norm(self, x) -> float:
        return norm(x, self)

    def __str__(self):
        p = "inf" if self.p == INF else f"{self.p:g}"
        return f"l^{self.dim}_{p}"


def norm(x, space: SequenceSpace) -> float:
    """||x|| in ``space``; raises :class:`DimensionMismatch` on bad length."""
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != space.dim:
        raise DimensionMismatch(f"vector of shape {x.shape} is not in {space}")
    return float(pnorm(x, space.p))


@dataclass(frozen=True, eq=False)
class QuotientSpace:
    """l^d_1 / Y with Y spanned by the rows of ``basis``."""

    ambient: SequenceSpace
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.ambient.p != 1:
            raise ValueError("quotients are taken of l^d_1 only")
        b = np.asarray(self.basis, dtype=complex).reshape(-1, self.ambient.dim)
        if b.shape[0] >= self.ambient.dim:
            raise PreconditionError("dim Y must be smaller than the ambient dimension")
        if b.shape[0] and np.linalg.matrix_rank(b) < b.shape[0]:
            raise PreconditionError("basis of Y is linearly dependent")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def codim(self) -> int:
        return self.ambient.dim - self.basis.shape[0]

    @property
    def dim_y(self) -> int:
        return self.basis.shape[0]

    @cached_property
    def is_real(self) -> bool:
        return bool(np.all(self.basis.imag == 0))

    def distance_to_y(self, x) -> float:
        """Euclidean distance from x to Y (membership residual)."""
        x = np.asarray(x, dtype=complex)
        if self.dim_y == 0:
            return float(np.linalg.norm(x))
        c, *_ = np.linalg.lstsq(self.basis.T, x, rcond=None)
        return float(np.linalg.norm(x - self.basis.T @ c))

    def min_representative(self, x):
        """Return (c, dist) with ||x - c @ basis||_1 = dist minimal."""
        c, d = min_l1_coset(np.asarray(x)[None, :], self.basis)
        return c[0], float(d[0])

    def quotient_norm(self, x) -> float:
        return quotient_norm(x, self)


def quotient_norm(x, qs: QuotientSpace) -> float:
    """Distance in l^d_1 from x to the subspace Y."""
    x = np.asarray(x)
    if x.shape != (qs.ambient.dim,):
        raise DimensionMismatch(f"vector of shape {x.shape} is not in {qs.ambient}")
    if qs.dim_y == 0:
        return float(np.abs(x).sum())
    return qs.min_representative(x)[1]


def _l1_lp_real(x, basis):
    """min_c ||x - c @ basis||_1 for real data, one LP per row."""
    k, d = basis.shape
    # variables: c (k, free), t (d, >= 0); minimise sum t with |x - B^T c| <= t
    cost = np.concatenate([np.zeros(k), np.ones(d)])
    bt = basis.T
    a_ub = np.block([[-bt, -np.eye(d)], [bt, -np.eye(d)]])
    bounds = [(None, None)] * k + [(0, None)] * d
    cs = np.empty((x.shape[0], k))
    vals = np.empty(x.shape[0])
    for i, row in enumerate(x):
        res = linprog(cost, A_ub=a_ub, b_ub=np.concatenate([-row, row]),
                      bounds=bounds, method="highs")
        if not res.success:
            raise RuntimeError(res.message)
        cs[i] = res.x[:k]
        vals[i] = np.abs(row - bt @ res.x[:k]).sum()
    return cs, vals


def _l1_socp_complex(x, basis):
    """Complex case: sum of moduli is a second-order cone program.

    All rows are solved in one separable problem.
    """
    import cvxpy as cp

    n, d = x.shape
    k = basis.shape[0]
    # real embedding: c = a + ib, (B^T c)_j split into re/im parts
    br, bi = basis.real.T, basis.imag.T  # (d, k)
    a = cp.Variable((n, k))
    b = cp.Variable((n, k))
    re = x.real - (a @ br.T - b @ bi.T)
    im = x.imag - (a @ bi.T + b @ br.T)
    stacked = cp.vstack([cp.vec(re, order="C"), cp.vec(im, order="C")])
    obj = cp.sum(cp.norm(stacked, 2, axis=0))
    prob = cp.Problem(cp.Minimize(obj))
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10,
               tol_feas=1e-10, max_iter=400)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"coset SOCP failed: {prob.status}")
    c = a.value + 1j * b.value
    vals = np.abs(x - c @ basis).sum(axis=1)
    return c, vals


def _embed(basis):
    """M with (Re, Im) of (c @ basis)_j equal to M[j] @ (Re c, Im c)."""
    k, d = basis.shape
    br, bi = basis.real, basis.imag
    M = np.empty((d, 2, 2 * k))
    M[:, 0, :k], M[:, 0, k:] = br.T, -bi.T
    M[:, 1, :k], M[:, 1, k:] = bi.T, br.T
    return M


def _l1_smooth_complex(x, basis, newton_steps: int = 8):
    """Minimise sum_j |x_j - (c @ basis)_j| over complex c, all rows at once.

    Damped Newton on the smoothed terms sqrt(|r_j|^2 + mu^2) with mu driven
    from 1e-1 to 1e-13 (relative), warm-starting each level.  The vertices
    where k residual coordinates vanish are also evaluated exactly, and each
    row keeps its best candidate; every candidate is an actual point, so the
    returned value never undershoots the minimum.
    """
    n, d = x.shape
    k = basis.shape[0]
    M = _embed(basis)                                   # (d, 2, 2k)
    X = np.stack([x.real, x.imag], axis=2)              # (n, d, 2)
    scale = np.maximum(np.abs(x).sum(axis=1), 1e-300)   # (n,)

    Mflat = M.reshape(2 * d, 2 * k)

    def resid(v):
        return X - (v @ Mflat.T).reshape(n, d, 2)

    def exact(v):
        return np.linalg.norm(resid(v), axis=2).sum(axis=1)

    def smooth(v, mu, rows=slice(None)):
        r = X[rows] - (v @ Mflat.T).reshape(-1, d, 2)
        return np.sqrt((r * r).sum(axis=2) + mu[rows, None] ** 2).sum(axis=1)

    mtm = Mflat.T @ Mflat
    gram = np.einsum("jab,jac->jbc", M, M).reshape(d, -1)   # M_j^T M_j
    v = np.linalg.solve(mtm, (X.reshape(n, 2 * d) @ Mflat).T).T
    for e in range(1, 14):
        mu = scale * 10.0 ** (-e)
        fcur = smooth(v, mu)
        for _ in range(newton_steps):
            r = resid(v)
            nr = np.sqrt((r * r).sum(axis=2) + mu[:, None] ** 2)
            nr = np.maximum(nr, 1e-300)
            u = r / nr[:, :, None]
            grad = -u.reshape(n, 2 * d) @ Mflat
            # sum_j M_j^T (I - u_j u_j^T) M_j / |r_j|, assembled with matmuls
            inv = 1.0 / nr
            hess = (inv @ gram).reshape(n, 2 * k, 2 * k)
            w = np.stack([u[:, j] @ M[j] for j in range(d)], axis=1)      # (n, d, 2k)
            hess -= np.matmul((w * inv[:, :, None]).transpose(0, 2, 1), w)
            # flat directions (non-unique minimisers) make the Hessian singular
            ridge = 1e-13 * np.trace(hess, axis1=1, axis2=2) + 1e-300
            hess += ridge[:, None, None] * np.eye(2 * k)
            step = -np.linalg.solve(hess, grad[:, :, None])[:, :, 0]
            cand = v + step
            fnew = smooth(cand, mu)
            bad = np.flatnonzero(fnew > fcur)
            t = 1.0
            for _ in range(30):
                if not bad.size:
                    break
                t /= 2
                trial = v[bad] + t * step[bad]
                ft = smooth(trial, mu, bad)
                good = ft <= fcur[bad]
                cand[bad[good]] = trial[good]
                fnew[bad[good]] = ft[good]
                bad = bad[~good]
            # rows that never improved stay put
            cand[bad] = v[bad]
            fnew[bad] = fcur[bad]
            v, fcur = cand, fnew
    best_v, best_f = v, exact(v)
    for Z in itertools.combinations(range(d), k):
        mz = M[list(Z)].reshape(-1, 2 * k)
        if np.linalg.matrix_rank(mz) < 2 * k:
            continue
        cand = np.linalg.solve(mz, X[:, list(Z)].reshape(n, -1).T).T
        f = exact(cand)
        better = f < best_f
        best_f = np.where(better, f, best_f)
        best_v = np.where(better[:, None], cand, best_v)
    return best_v[:, :k] + 1j * best_v[:, k:], best_f


def min_l1_coset(x, basis):
    """Rowwise minimal l^1 representatives of the cosets x + Y.

    Returns ``(c, dist)`` where row i of ``x - c @ basis`` has minimal l^1
    norm ``dist[i]``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    basis = np.asarray(basis, dtype=complex).reshape(-1, x.shape[1])
    if basis.shape[0] == 0:
        return np.zeros((x.shape[0], 0), complex), np.abs(x).sum(axis=1)
    if np.all(basis.imag == 0) and np.all(x.imag == 0):
        c, vals = _l1_lp_real(x.real, basis.real)
        return c.astype(complex), vals
    return _l1_smooth_complex(x, basis)


def min_l1_coset_socp(x, basis):
    """Second-order cone formulation of :func:`min_l1_coset` (cvxpy);
    an independent route kept for cross-checking."""
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    basis = np.asarray(basis, dtype=complex).reshape(-1, x.shape[1])
    return _l1_socp_complex(x, basis)


@dataclass(frozen=True, eq=False)
class LinearMap:
    matrix: np.ndarray
    domain: SequenceSpace
    codomain: SequenceSpace

    def __post_init__(self):
        a = np.array(self.matrix, dtype=complex)
        if a.shape != (self.codomain.dim, self.domain.dim):
            raise DimensionMismatch(
                f"matrix {a.shape} does not map {self.domain} to {self.codomain}")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    def __call__(self, x):
        return self.matrix @ np.asarray(x)

    def inverse(self) -> "LinearMap":
        return LinearMap(np.linalg.inv(self.matrix), self.codomain, self.domain)

    def op_norm(self, **kw) -> float:
        return op_norm(self.matrix, self.domain.p, self.codomain.p, **kw)


def op_norm_exact(a, p_in: float, p_out: float):
    """Closed-form ||A : l_p_in -> l_p_out|| or None when none is known."""
    a = np.asarray(a)
    if p_in == 1:
        return float(pnorm(a, p_out, axis=0).max())
    if p_out == INF:
        return float(pnorm(a, dual_exponent(p_in), axis=1).max())
    if p_in == 2 and p_out == 2:
        return float(np.linalg.norm(a, 2))
    return None


def op_norm(a, p_in: float, p_out: float, *, starts: int = 16,
            iters: int = 200, samples: int = 4096, seed: int = 0) -> float:
    """||A : l_p_in -> l_p_out||.

    Exact where a classical formula exists; otherwise a lower estimate from
    the nonlinear power method plus random directions.
    """
    exact = op_norm_exact(a, p_in, p_out)
    if exact is not None:
        return exact
    a = np.asarray(a, dtype=complex)
    n = a.shape[1]
    rng = np.random.default_rng(seed)

    def ratio(x):
        return pnorm(x @ a.T, p_out) / pnorm(x, p_in)

    z = rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))
    if p_in == INF:
        z = np.exp(1j * np.angle(z))
    best = float(ratio(z).max())
    x = z[np.argsort(ratio(z))[-starts:]]
    for _ in range(iters):
        # Boyd's iteration x <- J_q(A^* J_p(Ax))
        y = dual_vector(x @ a.T, p_out)
        w = y @ a.conj()
        if p_in == INF:
            x = np.where(np.abs(w) > 0, w / np.where(np.abs(w) > 0, np.abs(w), 1), 1.0)
        else:
            x = dual_vector(w, dual_exponent(p_in))
            x = x / pnorm(x, p_in)[:, None]
        best = max(best, float(ratio(x).max()))
    return best


def dft_matrix(n: int) -> np.ndarray:
    """W_n with entries exp(2 pi i (j-1)(k-1) / n)."""
    j = np.arange(n)
    return np.exp(2j * np.pi * np.outer(j, j) / n)


@dataclass(frozen=True)
class BMWitness:
    t: LinearMap
    t_inv: LinearMap
    bound: float
    t_norm: float
    t_inv_norm: float

    @property
    def product(self) -> float:
        return self.t_norm * self.t_inv_norm


def bm_witness(n: int, p) -> BMWitness:
    """Isomorphism T: l^n_1 -> l^n_p with ||T|| ||T^-1|| <= n^(1 - 1/min(2,p)).

    T is the identity for p <= 2 and the DFT matrix W_n otherwise.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    p = parse_exponent(p)
    src, dst = SequenceSpace(n, 1), SequenceSpace(n, p)
    r = min(2.0, p)
    bound = n ** (1 - 1 / r)
    mat = np.eye(n) if p <= 2 else dft_matrix(n)
    t = LinearMap(mat, src, dst)
    t_inv = t.inverse()
    t_norm = t.op_norm()
    t_inv_norm = t_inv.op_norm()
    if t_norm * t_inv_norm > bound * (1 + LP_TOL) + LP_TOL:
        raise AssertionError(f"witness exceeds n^(1-1/r): {t_norm * t_inv_norm} > {bound}")
    return BMWitness(t, t_inv, bound, t_norm, t_inv_norm)
