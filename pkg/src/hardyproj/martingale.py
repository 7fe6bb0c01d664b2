"""Finite Hardy martingales on T^m and related Monte-Carlo checks.

Level n of a martingale is a trigonometric polynomial in (theta_1, ...,
theta_n) whose frequency in theta_n is strictly positive, which makes the
conditional mean over theta_n vanish and the last-variable sections
analytic.  Sampling uses independent uniform angles; every estimator is
deterministic for a fixed seed (chunks draw from spawned substreams and
are reduced with compensated sums).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, LacunaryError, PreconditionError
from .spaces import SequenceSpace, pnorm
from .trigpoly import VecTrigPoly, grid_values

CHUNK = 20_000
EXHAUSTIVE_SIGNS = 1024
EXHAUSTIVE_BOX = 100_000


@dataclass(frozen=True, eq=False)
class HardyMartingale:
    """Difference polynomials dM_0, ..., dM_m.

    ``diffs[0]`` maps ``()`` to the constant M_0; ``diffs[n]`` maps
    frequency tuples (p_1, ..., p_n) with p_n > 0 to coefficient vectors.
    ``degree_bounds[n]`` is the box bound |p_k| <= r_n of level n.
    """

    space: SequenceSpace
    diffs: tuple = field(repr=False)
    degree_bounds: tuple = ()

    def __post_init__(self):
        diffs = tuple(dict(d) for d in self.diffs)
        if not diffs or set(diffs[0]) - {()}:
            raise PreconditionError("diffs[0] must be {(): M_0}")
        bounds = list(self.degree_bounds) or [0] + [
            max((max(abs(q) for q in key) for key in d), default=0) for d in diffs[1:]]
        if len(bounds) != len(diffs):
            raise PreconditionError("one degree bound per level is required")
        packed = []
        for n, d in enumerate(diffs):
            keys = np.array(sorted(d), dtype=np.int64).reshape(len(d), n)
            if n >= 1 and keys.size:
                if np.any(keys[:, -1] <= 0):
                    raise PreconditionError(f"level {n}: last frequency must be > 0")
                if np.abs(keys).max() > bounds[n]:
                    raise PreconditionError(f"level {n}: frequency exceeds r_{n} = {bounds[n]}")
            vals = np.array([np.asarray(d[tuple(k)], complex).reshape(self.space.dim)
                             for k in keys.tolist()]).reshape(len(d), self.space.dim)
            packed.append((keys, vals))
        object.__setattr__(self, "diffs", diffs)
        object.__setattr__(self, "degree_bounds", tuple(int(b) for b in bounds))
        object.__setattr__(self, "_packed", tuple(packed))

    @property
    def m(self) -> int:
        return len(self.diffs) - 1

    @property
    def m0(self):
        return np.asarray(self.diffs[0].get((), np.zeros(self.space.dim)), complex)

    def is_zero(self) -> bool:
        return all(not np.any(v) for _, v in self._packed)

    def level_values(self, theta):
        """dM_n(theta) for all levels; theta has shape (S, m). Returns (S, m+1, d)."""
        theta = np.asarray(theta, float)
        theta = theta.reshape(theta.shape[0] if theta.ndim > 1 else -1, self.m) if self.m else \
            theta.reshape(len(theta), 0)
        out = np.zeros((theta.shape[0], self.m + 1, self.space.dim), complex)
        for n, (keys, vals) in enumerate(self._packed):
            if not keys.shape[0]:
                continue
            if n == 0:
                out[:, 0] = vals[0]
            else:
                out[:, n] = np.exp(1j * (theta[:, :n] @ keys.T)) @ vals
        return out

    def conditional_mean_vanishes(self) -> bool:
        """Integrating dM_n over theta_n kills every term (p_n > 0)."""
        return all(not keys.shape[0] or bool(np.all(keys[:, -1] > 0))
                   for keys, _ in self._packed[1:])


def steinhaus_martingale(m: int, dim: int = 1, p=2) -> HardyMartingale:
    """dM_n = e^{i theta_n} e_1, M_0 = 0."""
    space = SequenceSpace(dim, p)
    e1 = np.eye(dim)[0]
    diffs = [{(): np.zeros(dim)}] + [{(0,) * (n - 1) + (1,): e1} for n in range(1, m + 1)]
    return HardyMartingale(space, tuple(diffs), tuple([0] + [1] * m))


def random_martingale(rng: np.random.Generator, m: int, space: SequenceSpace,
                      max_degree: int = 2, terms: int = 4, with_m0: bool = True) -> HardyMartingale:
    """Complex-Gaussian coefficients on a random sparse support per level."""
    d = space.dim
    m0 = rng.standard_normal(d) + 1j * rng.standard_normal(d) if with_m0 else np.zeros(d)
    diffs = [{(): m0}]
    bounds = [0]
    for n in range(1, m + 1):
        r = int(rng.integers(1, max_degree + 1))
        level = {}
        for _ in range(terms):
            key = tuple(int(v) for v in rng.integers(-r, r + 1, size=n - 1)) + (int(rng.integers(1, r + 1)),)
            level[key] = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        diffs.append(level)
        bounds.append(r)
    return HardyMartingale(space, tuple(diffs), tuple(bounds))


# Monte-Carlo -------------------------------------------------------------

def _chunks(seed: int, samples: int):
    n = max(1, math.ceil(samples / CHUNK))
    streams = np.random.SeedSequence(seed).spawn(n)
    for i, ss in enumerate(streams):
        size = min(CHUNK, samples - i * CHUNK)
        yield np.random.default_rng(ss), size


class _Moments:
    """Running sums of x and x^2 per column, reduced with fsum."""

    def __init__(self, k):
        self.parts = [[] for _ in range(k)]
        self.parts2 = [[] for _ in range(k)]
        self.count = 0

    def add(self, x):
        x = np.asarray(x, float).reshape(x.shape[0], -1)
        for j in range(x.shape[1]):
            self.parts[j].append(float(x[:, j].sum()))
            self.parts2[j].append(float((x[:, j] ** 2).sum()))
        self.count += x.shape[0]

    def mean(self):
        return np.array([math.fsum(p) / self.count for p in self.parts])

    def stderr(self):
        mu = self.mean()
        m2 = np.array([math.fsum(p) / self.count for p in self.parts2])
        var = np.maximum(m2 - mu * mu, 0.0) * self.count / max(self.count - 1, 1)
        return np.sqrt(var / self.count)


@dataclass(frozen=True)
class PathStats:
    level_means: np.ndarray
    level_stderr: np.ndarray
    final_mean: float
    final_stderr: float
    samples: int
    seed: int


def sample_path(M: HardyMartingale, rng_seed: int = 0, samples: int = 100_000) -> PathStats:
    """E||dM_n|| for every level and E||M_m||, with standard errors."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    acc = _Moments(M.m + 2)
    for rng, size in _chunks(rng_seed, samples):
        theta = rng.uniform(0, 2 * np.pi, size=(size, M.m))
        lv = M.level_values(theta)
        norms = pnorm(lv, M.space.p)
        final = pnorm(lv.sum(axis=1), M.space.p)
        acc.add(np.column_stack([norms, final]))
    mu, se = acc.mean(), acc.stderr()
    return PathStats(mu[:-1], se[:-1], float(mu[-1]), float(se[-1]), samples, rng_seed)


@dataclass(frozen=True)
class SquareFunctionCheck:
    lhs: float
    rhs: float
    rel_stderr: float
    passed: bool
    stats: PathStats = field(repr=False)


def square_fn_check(M: HardyMartingale, eta_bound: float, rng_seed: int = 0,
                    samples: int = 100_000) -> SquareFunctionCheck:
    """[sum_n (E||dM_n||)^2]^(1/2) <= 2 eta E||M_m||, with 3 s.e. slack."""
    st = sample_path(M, rng_seed, samples)
    lhs = float(math.sqrt(math.fsum(st.level_means ** 2)))
    rhs = 2.0 * eta_bound * st.final_mean
    rel = 0.0
    if lhs > 0:
        rel += float(math.sqrt(math.fsum((st.level_means * st.level_stderr) ** 2))) / lhs ** 2
    if st.final_mean > 0:
        rel += st.final_stderr / st.final_mean
    return SquareFunctionCheck(lhs, rhs, rel, bool(lhs <= rhs * (1 + 3 * rel)), st)


@dataclass(frozen=True)
class UHMDEstimate:
    K: float
    pattern: tuple
    patterns_tried: int
    base_mean: float
    defined: bool


def _sign_patterns(m: int, sign_patterns, rng):
    k = m + 1
    if sign_patterns is not None and not isinstance(sign_patterns, (int, np.integer)):
        pats = np.asarray(sign_patterns, dtype=float).reshape(-1, k)
    elif 2 ** k <= EXHAUSTIVE_SIGNS:
        pats = np.array(list(itertools.product((1.0, -1.0), repeat=k)))
    else:
        count = int(sign_patterns or EXHAUSTIVE_SIGNS)
        pats = rng.choice([1.0, -1.0], size=(count, k))
    return np.vstack([np.ones(k), pats])


def uhmd_estimate(M: HardyMartingale, sign_patterns=None, rng_seed: int = 0,
                  samples: int = 50_000) -> UHMDEstimate:
    """max over sign patterns of E||sum eps_n dM_n|| / E||M_m||.

    ``sign_patterns`` may be an explicit array of +-1 rows, a count of
    random patterns, or None (exhaustive when 2^(m+1) <= 1024).  The
    all-plus pattern is always included, so K >= 1.
    """
    rng = np.random.default_rng(np.random.SeedSequence(rng_seed).spawn(2)[1])
    pats = _sign_patterns(M.m, sign_patterns, rng)
    if M.is_zero():
        return UHMDEstimate(math.nan, tuple(pats[0]), len(pats), 0.0, False)
    acc = _Moments(len(pats))
    for g, size in _chunks(rng_seed, samples):
        theta = g.uniform(0, 2 * np.pi, size=(size, M.m))
        lv = M.level_values(theta)
        cols = []
        for start in range(0, len(pats), 64):
            sums = np.einsum("snd,pn->spd", lv, pats[start:start + 64])
            cols.append(pnorm(sums, M.space.p))
        acc.add(np.concatenate(cols, axis=1))
    mu = acc.mean()
    if mu[0] == 0:
        return UHMDEstimate(math.nan, tuple(pats[0]), len(pats), 0.0, False)
    ratios = mu / mu[0]
    j = int(np.argmax(ratios))
    return UHMDEstimate(float(ratios[j]), tuple(int(v) for v in pats[j]), len(pats),
                        float(mu[0]), True)


@dataclass(frozen=True)
class ComparisonResult:
    steinhaus_mean: float
    rademacher_mean: float
    ratio: float
    rel_stderr: float
    passed: bool


def steinhaus_vs_rademacher(x, space: SequenceSpace, rng_seed: int = 0,
                            samples: int = 100_000) -> ComparisonResult:
    """E||sum e^{i theta_k} x_k|| against 2 E||sum eps_k x_k||."""
    x = np.asarray(x, complex).reshape(-1, space.dim)
    if x.shape[0] == 0:
        raise PreconditionError("need at least one vector")
    acc = _Moments(2)
    for rng, size in _chunks(rng_seed, samples):
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=(size, x.shape[0])))
        signs = rng.choice([1.0, -1.0], size=(size, x.shape[0]))
        acc.add(np.column_stack([pnorm(phases @ x, space.p), pnorm(signs @ x, space.p)]))
    mu, se = acc.mean(), acc.stderr()
    st, ra = float(mu[0]), float(mu[1])
    rel = (se[0] / st if st else 0.0) + (se[1] / ra if ra else 0.0)
    return ComparisonResult(st, ra, st / ra if ra else math.nan, float(rel),
                            bool(st <= 2 * ra * (1 + 3 * rel)))


# lacunary packing -----------------------------------------------------------

@dataclass(frozen=True)
class LacunaryPack:
    """Integers mu_n and 1-based indices ell_n packing level n of a
    martingale into the block [a_{ell_n}, lambda_{ell_n} a_{ell_n}]."""

    a: tuple
    lam: tuple
    mu: tuple
    ell: tuple
    r: tuple

    @property
    def levels(self) -> int:
        return len(self.mu)

    def block(self, n: int):
        """Frequency block of level n (1-based)."""
        i = self.ell[n - 1] - 1
        return self.a[i], self.lam[i] * self.a[i]


def _check_sequences(a, lam):
    for i in range(len(a) - 1):
        if not a[i] < a[i + 1]:
            raise PreconditionError("a must be strictly increasing")
    for i in range(min(len(a) - 1, len(lam))):
        if not a[i] * lam[i] < a[i + 1]:
            raise PreconditionError(f"a_{i + 1} lambda_{i + 1} >= a_{i + 2}")


def lacunary_pack(a, lam, r, m: int) -> LacunaryPack:
    """Choose mu_1..mu_m and ell_1 < ... < ell_m so that every admissible
    frequency vector of level n (p_n in [1, r_n], |p_k| <= r_n) satisfies
    a_{ell_n} <= sum_k mu_k p_k <= lambda_{ell_n} a_{ell_n}.

    ell_n is the least admissible index and mu_n the lower end of its
    interval.  Arithmetic is exact.
    """
    a = tuple(int(v) for v in a)
    lam = tuple(int(v) for v in lam)
    r = tuple(int(v) for v in r)
    if len(r) < m:
        raise PreconditionError(f"need {m} degree bounds, got {len(r)}")
    if any(v < 1 for v in r[:m]):
        raise PreconditionError("degree bounds must be >= 1")
    if not a or a[0] < 1:
        raise PreconditionError("a must start with a positive integer")
    _check_sequences(a, lam)
    L = min(len(a), len(lam))
    mu, ell = [], []
    total = 0
    for n in range(1, m + 1):
        rn = r[n - 1]
        if n == 1:
            cand = (i for i in range(1, L + 1) if lam[i - 1] > rn)
        else:
            lo = max(rn, ell[-1]) + 1
            cand = (i for i in range(lo, L + 1)
                    if (lam[i - 1] - rn) * a[i - 1] >= rn * (2 + (rn + 1) * total))
        i = next(cand, None)
        if i is None:
            raise LacunaryError(n, f"no admissible index among the first {L} terms")
        mu_n = a[i - 1] if n == 1 else a[i - 1] + rn * total
        ell.append(i)
        mu.append(mu_n)
        total += mu_n
    pack = LacunaryPack(a, lam, tuple(mu), tuple(ell), r[:m])
    bad = verify_pack(pack, exhaustive=False)
    if bad:
        raise AssertionError(f"packing inequality fails at levels {bad}")
    return pack


def level_range(pack: LacunaryPack, n: int):
    """Exact min and max of sum mu_k p_k over level n's box."""
    rn = pack.r[n - 1]
    before = sum(pack.mu[: n - 1])
    return pack.mu[n - 1] - rn * before, rn * pack.mu[n - 1] + rn * before


def verify_pack(pack: LacunaryPack, exhaustive: bool = True,
                limit: int = EXHAUSTIVE_BOX) -> list:
    """Levels violating the packing inequality (empty list when all hold).

    Corner points are always checked; when the box has at most ``limit``
    points every frequency vector is enumerated too.
    """
    bad = []
    for n in range(1, pack.levels + 1):
        lo, hi = pack.block(n)
        vmin, vmax = level_range(pack, n)
        ok = lo <= vmin and vmax <= hi
        rn = pack.r[n - 1]
        if ok and exhaustive and (2 * rn + 1) ** (n - 1) * rn <= limit:
            mu = pack.mu[:n]
            rng_k = range(-rn, rn + 1)
            for head in itertools.product(rng_k, repeat=n - 1):
                base = sum(m_ * p_ for m_, p_ in zip(mu, head))
                for pn in range(1, rn + 1):
                    v = base + mu[-1] * pn
                    if not lo <= v <= hi:
                        ok = False
                        break
                if not ok:
                    break
        if not ok:
            bad.append(n)
    return bad


def blocks_disjoint(pack: LacunaryPack) -> bool:
    blocks = [pack.block(n) for n in range(1, pack.levels + 1)]
    return all(blocks[i][1] < blocks[i + 1][0] for i in range(len(blocks) - 1))


def substitute_freq(M: HardyMartingale, pack: LacunaryPack, theta) -> VecTrigPoly:
    """eta -> M_m(theta_1 + mu_1 eta, ..., theta_m + mu_m eta).

    The frequency of level n's term lands in block n; this is asserted.
    """
    if pack.levels < M.m:
        raise DimensionMismatch(f"pack has {pack.levels} levels, martingale {M.m}")
    if any(M.degree_bounds[n] > pack.r[n - 1] for n in range(1, M.m + 1)):
        raise PreconditionError("martingale degree bounds exceed the pack's")
    theta = np.asarray(theta, float).reshape(-1)
    if theta.size < M.m:
        raise DimensionMismatch("need one fixed angle per level")
    freqs, coeffs = [0], [M.m0]
    for n in range(1, M.m + 1):
        lo, hi = pack.block(n)
        for key, vec in M.diffs[n].items():
            k = sum(int(mu) * int(p) for mu, p in zip(pack.mu, key))
            if not lo <= k <= hi:
                raise AssertionError(f"level {n} frequency {k} outside [{lo}, {hi}]")
            phase = np.exp(1j * float(np.dot(key, theta[:n])))
            freqs.append(k)
            coeffs.append(phase * np.asarray(vec, complex))
    return VecTrigPoly(M.space, np.array(freqs, dtype=np.int64), np.array(coeffs))


# equidistribution ------------------------------------------------------------

@dataclass(frozen=True)
class WeylResult:
    lhs: complex
    rhs: complex
    gap: float
    grid: int


def weyl_check(f: dict, n: int, grid: int | None = None) -> WeylResult:
    """Compare the mean of theta -> f(theta, n theta, ..., n^p theta) with
    the mean of f over the torus (its all-zero coefficient).

    ``f`` maps frequency tuples (k_0, ..., k_p) to complex coefficients.
    """
    if not f:
        return WeylResult(0j, 0j, 0.0, grid or 1)
    dims = {len(k) for k in f}
    if len(dims) != 1:
        raise DimensionMismatch("all frequency tuples must have the same length")
    sub = {}
    for key, c in f.items():
        k = sum(int(kj) * int(n) ** j for j, kj in enumerate(key))
        sub[k] = sub.get(k, 0) + complex(c)
    top = max(abs(k) for k in sub)
    s = top + 1 if grid is None else int(grid)
    poly = VecTrigPoly(SequenceSpace(1, 2), np.array(list(sub), dtype=np.int64),
                       np.array(list(sub.values()))[:, None])
    vals = grid_values(poly, s)[:, 0]
    lhs = complex(math.fsum(vals.real) / s, math.fsum(vals.imag) / s)
    rhs = complex(f.get(next(iter(dims)) * (0,), 0))
    return WeylResult(lhs, rhs, abs(lhs - rhs), s)


def to_record(experiment: str, params: dict, seed, estimates: dict, stderr: dict,
              passed: bool) -> dict:
    """JSON-ready experiment record."""
    return {"experiment": experiment, "params": params, "seed": seed,
            "estimates": estimates, "stderr": stderr, "pass": bool(passed)}
