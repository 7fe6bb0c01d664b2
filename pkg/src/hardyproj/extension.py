"""Finitely supported operators on H^1 and L^1, bounded extension, and
numerical certificates for the H^1-projectivity constant of l^n_p.

An operator is described by its values ``y_k = u(e^{ik.})`` on exponentials.
Its norm on L^1 is the sup over theta of ``||sum_k y_k e^{ik theta}||``; the
norm on H^1 has no finite description, so only lower bounds (test
functions) and upper bounds (the L^1 value of some extension) are ever
reported.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionMismatch, GridTooSmall, PreconditionError
from .kernels import vdp
from .spaces import INF, SequenceSpace, bm_witness, dual_vector, parse_exponent, pnorm
from .trigpoly import (VecTrigPoly, convolve, default_grid, grid_values, lp_norm,
                       pointwise_norms)

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OperatorSymbol:
    """Operator given by ``y_k = u(e^{ik.})`` for finitely many k."""

    codomain: SequenceSpace
    poly: VecTrigPoly = field(repr=False)
    analytic: bool = True

    def __post_init__(self):
        if self.poly.space.dim != self.codomain.dim:
            raise DimensionMismatch("symbol values do not live in the codomain")
        if self.analytic and not self.poly.analytic():
            raise PreconditionError("analytic-only symbol has negative frequencies")

    @classmethod
    def from_dict(cls, codomain: SequenceSpace, values: dict, analytic: bool | None = None):
        poly = VecTrigPoly.from_dict(codomain, values).pruned()
        if analytic is None:
            analytic = poly.analytic()
        return cls(codomain, poly, analytic)

    @property
    def values(self) -> dict:
        return self.poly.to_dict()

    @property
    def support(self):
        return self.poly.support

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def apply(self, h_coeffs: dict):
        """u(h) for a scalar polynomial h given as {k: coefficient}."""
        out = np.zeros(self.codomain.dim, complex)
        for k, c in h_coeffs.items():
            out += c * self.poly.coeff(k)
        return out

    def with_values(self, extra: VecTrigPoly) -> "OperatorSymbol":
        return OperatorSymbol(self.codomain, self.poly + extra, analytic=False)


def _gaussian_int(z):
    r, i = float(z.real), float(z.imag)
    if r.is_integer() and i.is_integer():
        return int(r), int(i)
    return None


def pairing(u: OperatorSymbol, F: VecTrigPoly):
    """Bilinear pairing sum_k <y_k, F^(k)> (no complex conjugation).

    Exact (int / Fraction / complex of ints) when all entries are Gaussian
    integers, floating point otherwise.
    """
    if F.space.dim != u.codomain.dim:
        raise DimensionMismatch("pairing needs matching dimensions")
    keys = np.intersect1d(u.poly.pruned().freqs, F.pruned().freqs)
    pairs = [(u.poly.coeff(k), F.coeff(k)) for k in keys]
    ints = [(_gaussian_int(a), _gaussian_int(b)) for y, f in pairs for a, b in zip(y, f)]
    if all(a is not None and b is not None for a, b in ints):
        re = sum(a[0] * b[0] - a[1] * b[1] for a, b in ints)
        im = sum(a[0] * b[1] + a[1] * b[0] for a, b in ints)
        return Fraction(re) if im == 0 else complex(re, im)
    re = math.fsum(float((a * b).real) for y, f in pairs for a, b in zip(y, f))
    im = math.fsum(float((a * b).imag) for y, f in pairs for a, b in zip(y, f))
    return complex(re, im)


def l1_op_norm(u: OperatorSymbol, grid_size: int | None = None) -> float:
    """sup_theta ||sum_k y_k e^{ik theta}||_Y, grid max plus local refinement."""
    if u.is_zero():
        return 0.0
    width = u.poly.spread + 1
    if grid_size is not None and grid_size < 8 * width:
        raise GridTooSmall(f"grid {grid_size} below 8 * support width {8 * width}")
    return lp_norm(u.poly, INF, grid_size or default_grid(u.poly))


def paley_symbol(n: int, Y: SequenceSpace) -> OperatorSymbol:
    """u(h) = (h^(3), h^(9), ..., h^(3^n)) as a symbol into Y."""
    if Y.dim != n:
        raise DimensionMismatch(f"Paley symbol of order {n} needs dim Y = {n}, got {Y.dim}")
    eye = np.eye(n)
    return OperatorSymbol.from_dict(Y, {3 ** (k + 1): eye[k] for k in range(n)}, analytic=True)


def lacunary_test_function(n: int, p) -> VecTrigPoly:
    """f(theta) = sum_k e^{i 3^k theta} e_k in l^n_p."""
    eye = np.eye(n)
    return VecTrigPoly.from_dict(SequenceSpace(n, p), {3 ** (k + 1): eye[k] for k in range(n)})


# H^1 -> Y lower bounds --------------------------------------------------

def _szego_values(u: OperatorSymbol, w):
    """u(f_w) for f_w = (1-|w|^2)/(1 - conj(w) e^{i theta})^2, ||f_w||_{H^1} = 1."""
    keys = u.poly.freqs.astype(float)
    w = np.asarray(w, dtype=complex)
    rho2 = np.abs(w) ** 2
    with np.errstate(under="ignore"):
        coef = (1 - rho2)[:, None] * (keys + 1)[None, :] * np.conj(w)[:, None] ** keys[None, :]
    return coef @ u.poly.coeffs


def _certified_h1_upper(h_grid_abs_mean, degree, s):
    """Upper bound on ||h||_1 from a grid mean, valid for s >= (r+1) deg."""
    if degree == 0:
        return h_grid_abs_mean
    r = s // degree - 1
    return h_grid_abs_mean * (r + 1) / (r - 1)


def h1_op_norm_lower(u: OperatorSymbol, trials: int = 1000, seed: int = 0,
                     return_details: bool = False):
    """Lower bound for ||u : H^1 -> Y|| from unit-norm test functions.

    Half the trials use f_w = (1-|w|^2)/(1-conj(w)e^{i theta})^2 on a
    polar grid of w, the other half seeded random analytic polynomials whose
    H^1 norm is bounded above through the grid-mean inequality (so every
    ratio is a genuine lower bound).
    """
    if not u.analytic:
        raise PreconditionError("h1_op_norm_lower needs an analytic-only symbol")
    if u.is_zero():
        return (0.0, {}) if return_details else 0.0
    p = u.codomain.p
    rng = np.random.default_rng(seed)
    n_w = max(1, trials // 2)
    n_rand = max(0, trials - n_w)

    # w = 0 first so constant symbols are detected exactly
    n_ang = max(1, int(math.sqrt(n_w)))
    n_rad = max(1, (n_w - 1) // n_ang)
    t = np.linspace(0.0, 1.0, n_rad + 2)[1:-1]
    radii = 1 - 10.0 ** (-3.5 * t)
    ang = 2 * np.pi * np.arange(n_ang) / n_ang
    w = np.concatenate([[0.0], (radii[:, None] * np.exp(1j * ang)[None, :]).ravel()])
    vals = pnorm(_szego_values(u, w), p)
    i = int(np.argmax(vals))
    best, where = float(vals[i]), {"family": "szego", "w": complex(w[i])}
    # monomials e^{ik theta} have H^1 norm exactly 1
    mono = pnorm(u.poly.coeffs, p)
    j = int(np.argmax(mono))
    if mono[j] > best:
        best, where = float(mono[j]), {"family": "monomial", "k": int(u.poly.freqs[j])}

    keys = u.poly.freqs
    degrees = rng.choice(keys[keys > 0], size=n_rand) if np.any(keys > 0) else np.zeros(n_rand, int)
    for deg in np.unique(degrees):
        cnt = int(np.sum(degrees == deg))
        deg = int(deg)
        s = 1 << max(5, math.ceil(math.log2(32 * (deg + 1))))
        chunk = max(1, (1 << 22) // s)
        for start in range(0, cnt, chunk):
            m = min(chunk, cnt - start)
            c = rng.standard_normal((m, deg + 1)) + 1j * rng.standard_normal((m, deg + 1))
            # sparsify half of the batch to vary the shape
            c[: m // 2] *= rng.random((m // 2, deg + 1)) < 0.2
            c[:, deg] += 1.0
            folded = np.zeros((m, s), complex)
            folded[:, : deg + 1] = c
            absmean = np.abs(np.fft.ifft(folded, axis=1) * s).mean(axis=1)
            h1 = np.array([_certified_h1_upper(a, deg, s) for a in absmean])
            img = c[:, keys[keys <= deg]] @ u.poly.coeffs[keys <= deg]
            ratio = pnorm(img, p) / h1
            j = int(np.argmax(ratio))
            if ratio[j] > best:
                best, where = float(ratio[j]), {"family": "random", "degree": deg}
    return (best, where) if return_details else best


# bounded extension ----------------------------------------------------------

@dataclass
class ExtensionResult:
    extension: OperatorSymbol
    objective: float
    zero_completion: float
    lower_bound: float
    h1_lower: float
    lambda_est: float
    history: list
    iterations: int
    converged: bool


def extend_min(u: OperatorSymbol, neg_band: int, grid_size: int | None = None,
               tol: float = 1e-7, max_iter: int = 500, h1_trials: int = 200,
               seed: int = 0) -> ExtensionResult:
    """Minimise sup_theta ||u(theta) + sum_{m=1}^{neg_band} z_m e^{-im theta}||.

    Kelley's cutting-plane method on the epigraph: every grid angle gives a
    supporting hyperplane ``Re <phi, v(theta)> <= ||v(theta)||`` with phi a
    norming functional, and the LP over the accumulated cuts gives a lower
    bound.  The search box ``|Re z|, |Im z| <= zero-completion value`` loses
    nothing, since each coefficient of v is bounded by sup ||v||.
    """
    if neg_band < 1:
        raise ValueError("neg_band must be >= 1")
    if not u.analytic:
        raise PreconditionError("extend_min expects an analytic-only symbol")
    d, p = u.codomain.dim, u.codomain.p
    width = u.poly.spread + 1 + neg_band
    if grid_size is None:
        grid_size = 1 << math.ceil(math.log2(16 * width))
    s = int(grid_size)
    if s < 8 * width:
        raise GridTooSmall(f"grid {s} below 8 * (support + neg_band)")

    base = grid_values(u.poly, s)                       # (s, d)
    theta = 2 * np.pi * np.arange(s) / s
    m_idx = np.arange(1, neg_band + 1)
    ph = np.exp(-1j * np.outer(theta, m_idx))            # (s, nb)
    nv = neg_band * d

    def values(x):
        z = (x[:nv] + 1j * x[nv:]).reshape(neg_band, d)
        return base + ph @ z

    def objective(x):
        return pnorm(values(x), p)

    x0 = np.zeros(2 * nv)
    norms = objective(x0)
    zero_val = float(norms.max(initial=0.0))
    best_x, best = x0, zero_val
    history = [best]
    h1_low = h1_op_norm_lower(u, trials=h1_trials, seed=seed)
    if zero_val == 0:
        ext = OperatorSymbol(u.codomain, u.poly, analytic=False)
        return ExtensionResult(ext, 0.0, 0.0, 0.0, h1_low, math.nan, history, 0, True)

    box = zero_val
    rows, rhs = [], []
    n_cuts = min(s, 2 * nv + 8)
    lower = 0.0
    converged = False
    x = x0
    it = 0
    for it in range(1, max_iter + 1):
        v = values(x)
        nrm = pnorm(v, p)
        top = np.argsort(nrm)[::-1][:n_cuts]
        phi = dual_vector(v[top], p)                     # (K, d)
        c = np.conj(phi)[:, None, :] * ph[top][:, :, None]   # (K, nb, d)
        g = np.concatenate([c.real.reshape(len(top), nv), -c.imag.reshape(len(top), nv)], axis=1)
        const = np.real(np.sum(np.conj(phi) * base[top], axis=1))
        rows.append(np.hstack([g, -np.ones((len(top), 1))]))
        rhs.append(-const)
        cost = np.zeros(2 * nv + 1)
        cost[-1] = 1.0
        res = linprog(cost, A_ub=np.vstack(rows), b_ub=np.concatenate(rhs),
                      bounds=[(-box, box)] * (2 * nv) + [(0, None)], method="highs")
        if not res.success:
            log.warning("cutting-plane LP failed: %s", res.message)
            break
        lower = max(lower, float(res.fun))
        x = res.x[:-1]
        val = float(objective(x).max())
        if val < best:
            best, best_x = val, x
        history.append(best)
        if best - lower <= tol * max(1.0, best):
            converged = True
            break
    if not converged:
        log.info("extend_min stopped after %d iterations, gap %.3g", it, best - lower)

    z = (best_x[:nv] + 1j * best_x[nv:]).reshape(neg_band, d)
    completion = VecTrigPoly(u.codomain, -m_idx, z)
    ext = u.with_values(completion)
    sup_ext = l1_op_norm(ext, s)
    sup_zero = l1_op_norm(OperatorSymbol(u.codomain, u.poly, analytic=False), s)
    if sup_ext > sup_zero:
        ext, sup_ext = OperatorSymbol(u.codomain, u.poly, analytic=False), sup_zero
    lam = sup_ext / h1_low if h1_low > 0 else math.inf
    return ExtensionResult(ext, sup_ext, sup_zero, lower, h1_low, lam, history, it, converged)


# eta certificates ------------------------------------------------------------

@dataclass(frozen=True)
class EtaCertificate:
    n: int
    p: float
    f: VecTrigPoly = field(repr=False)
    u: OperatorSymbol = field(repr=False)
    pairing: Fraction
    f_norm: float
    u_bound: float
    eta_lower: float

    @property
    def q(self) -> float:
        return self.u.codomain.p


def paley_bound(n: int, q: float) -> float:
    """Norm bound 2 max(1, n^(1/q - 1/2)) of the Paley operator into l^n_q."""
    inv_q = 0.0 if q == INF else 1.0 / q
    return 2.0 * max(1.0, n ** (inv_q - 0.5))


def eta_lower_certificate(n: int, p, grid_size: int | None = None) -> EtaCertificate:
    """Lower bound for eta(l^n_p) by pairing the lacunary f with Paley's u."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = parse_exponent(p)
    X = SequenceSpace(n, p)
    f = lacunary_test_function(n, p)
    u = paley_symbol(n, X.dual())
    pr = pairing(u, f)
    if pr != n:
        raise AssertionError(f"pairing {pr} != {n}")
    f_norm = lp_norm(f, 1.0, grid_size)
    expected = n ** (0.0 if p == INF else 1.0 / p)
    if abs(f_norm - expected) > 1e-9 * max(1.0, expected):
        raise AssertionError(f"||f||_1 = {f_norm}, expected n^(1/p) = {expected}")
    u_bound = paley_bound(n, X.q)
    return EtaCertificate(n, p, f, u, pr, f_norm, u_bound, float(pr) / (u_bound * f_norm))


def eta_upper(n: int, p) -> float:
    """n^(1 - 1/min(2,p)), the Banach-Mazur distance bound to l^n_1."""
    return bm_witness(n, p).bound


# projective tensor norm bounds ------------------------------------------------

@dataclass(frozen=True)
class TensorBounds:
    lower: float
    upper: float
    l1_norm: float
    candidates: dict


def _h1_norm(h, s):
    return math.fsum(np.abs(h)) / s


def tensor_norm_bounds(F: VecTrigPoly, dual_trials: int = 32, seed: int = 0,
                       grid_size: int | None = None) -> TensorBounds:
    """Two-sided estimate of ||F|| in H^1 (projective) X.

    Lower side: the L^1(X) norm (contraction into H^1(X)), the smoothed
    norming symbol of F, and seeded random dual symbols, each pairing
    divided by the symbol's sup norm.  Upper side: the coordinatewise
    representation and the SVD rank-one representation.
    """
    if not F.analytic():
        raise PreconditionError("tensor_norm_bounds needs an analytic F")
    if F.is_zero():
        return TensorBounds(0.0, 0.0, 0.0, {})
    X = F.space
    Xd = X.dual()
    deg = F.degree
    s = grid_size or 1 << math.ceil(math.log2(32 * (deg + 1)))
    vals = grid_values(F, s)
    l1 = math.fsum(pnorm(vals, X.p)) / s
    cands = {"l1": l1}

    # norming functional phi(theta) with <F(theta), phi(theta)> = ||F(theta)||
    phi = np.conj(dual_vector(vals, X.p))
    psi = VecTrigPoly.from_samples(Xd, phi)
    # y_k = phi^(-k); V_{N,2} keeps coefficients on [-N, N] and bounds the sup
    psi = VecTrigPoly(Xd, -psi.freqs, psi.coeffs)
    for name, sym_poly in (("dirichlet", _band(psi, 0, deg)),
                           ("vdp", convolve(psi, vdp(max(deg, 1), 2)))):
        sym = OperatorSymbol(Xd, sym_poly, analytic=False)
        sup = l1_op_norm(sym)
        if sup > 0:
            cands[name] = abs(complex(pairing(sym, F))) / sup

    rng = np.random.default_rng(seed)
    best_rand = 0.0
    for _ in range(dual_trials):
        band = int(rng.integers(deg + 1, 2 * deg + 2))
        k = np.arange(-band, band + 1)
        c = rng.standard_normal((k.size, X.dim)) + 1j * rng.standard_normal((k.size, X.dim))
        sym = OperatorSymbol(Xd, VecTrigPoly(Xd, k, c), analytic=False)
        sup = l1_op_norm(sym)
        best_rand = max(best_rand, abs(complex(pairing(sym, F))) / sup)
    cands["random"] = best_rand
    lower = max(cands.values())

    coord = math.fsum(_h1_norm(vals[:, j], s) for j in range(X.dim))
    ups = {"coordinatewise": coord}
    # rank-one peeling from the SVD of the coefficient matrix
    U, sv, Vh = np.linalg.svd(F.coeffs, full_matrices=False)
    svd_total = 0.0
    for j in range(sv.size):
        if sv[j] == 0:
            continue
        h = VecTrigPoly(SequenceSpace(1, 1), F.freqs, (U[:, j] * sv[j])[:, None])
        svd_total += _h1_norm(grid_values(h, s)[:, 0], s) * float(pnorm(Vh[j], X.p))
    ups["svd"] = svd_total
    upper = min(ups.values())
    cands.update({f"upper_{k}": v for k, v in ups.items()})
    return TensorBounds(lower, upper, l1, cands)


def _band(f: VecTrigPoly, lo: int, hi: int) -> VecTrigPoly:
    keep = (f.freqs >= lo) & (f.freqs <= hi)
    return VecTrigPoly(f.space, f.freqs[keep], f.coeffs[keep])
