"""
Rectangle probabilities by randomized lattice rules.

The integrand is the separation-of-variables form of the multivariate normal
probability: after a Cholesky factorization ``C`` of the (reordered) scale
matrix the probability becomes an integral over the unit cube of

    prod_i (e_i - d_i),   d_i = Phi((a_i - sum_{j<i} c_ij y_j) / c_ii),
                          y_i = Phi^{-1}(d_i + w_i (e_i - d_i)),

with ``e_i`` defined like ``d_i`` from the upper limits. Variables are
ordered greedily so that the ones with the least conditional mass are
integrated first, which reduces the variance of the lattice estimate.

The multivariate t probability uses one extra lattice coordinate for the
chi mixing variable: ``X = delta + Y / s`` with ``s = chi_nu / sqrt(nu)``,
so the limits for ``Y`` become ``s (a - delta)`` and ``s (b - delta)``.

Each estimate is the mean over ``shifts`` independently shifted copies of
a rank-1 Korobov lattice with a prime number of points, periodized with the
baker's transform ``|2w - 1|``. The error is ``alpha`` times the standard
error of the shift means.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import special
from .core import (
    PD_TOLERANCE,
    DegenerateTruncation,
    NotPositiveDefinite,
    ProbabilityEstimate,
    QmcConfig,
    check_bounds,
    validate_spec,
)

DEFAULT_QMC = QmcConfig()
_MAX_CANDIDATES = 400


def next_prime(n: int) -> int:
    n = max(int(n), 2)
    while True:
        if n == 2 or (n % 2 and all(n % f for f in range(3, int(n ** 0.5) + 1, 2))):
            return n
        n += 1


def _p2_criterion(z: np.ndarray, n: int, weights: np.ndarray) -> float:
    m = np.arange(n, dtype=np.int64)
    x = (m[:, None] * z[None, :] % n) / n
    b2 = x * x - x + 1.0 / 6.0
    return float(np.prod(1.0 + weights * 2.0 * np.pi ** 2 * b2, axis=1).mean() - 1.0)


@lru_cache(maxsize=128)
def _korobov_vector(n: int, dim: int) -> tuple:
    if dim == 1 or n <= 3:
        return tuple(pow(2, j, n) if n > 2 else 1 for j in range(dim))
    weights = 1.0 / np.arange(1, dim + 1) ** 2
    cands = np.arange(2, n // 2 + 1)
    if cands.size > _MAX_CANDIDATES:
        cands = np.unique(np.linspace(2, n // 2, _MAX_CANDIDATES).astype(np.int64))
    best, best_val = None, np.inf
    for a in cands:
        z = np.array([pow(int(a), j, n) for j in range(dim)], dtype=np.int64)
        val = _p2_criterion(z, n, weights)
        if val < best_val:
            best, best_val = z, val
    return tuple(int(v) for v in best)


def korobov_vector(n_points: int, dim: int) -> np.ndarray:
    """Generating vector ``(1, a, a^2, ...) mod n_points`` of a Korobov lattice.

    The generator ``a`` minimizes the weighted ``P_2`` worst-case error
    (product weights ``1/j^2``) over a deterministic candidate set, so the
    result depends only on ``(n_points, dim)``. ``n_points`` should be prime.
    """
    return np.array(_korobov_vector(int(n_points), int(dim)), dtype=np.int64)


@dataclass(frozen=True, eq=False)
class LatticeRule:
    """Randomly shifted rank-1 lattice in ``[0, 1)^dim``."""

    z: np.ndarray
    n_points: int
    offsets: np.ndarray

    @classmethod
    def build(cls, dim: int, qmc: QmcConfig, seed: int) -> "LatticeRule":
        n = next_prime(qmc.samples)
        rng = np.random.default_rng(seed)
        return cls(korobov_vector(n, dim), n, rng.random((qmc.shifts, dim)))

    @property
    def dim(self) -> int:
        return self.z.shape[0]

    def points(self, shift: int) -> np.ndarray:
        """Baker-transformed points of one shift, shape ``(n_points, dim)``."""
        m = np.arange(1, self.n_points + 1, dtype=np.int64)
        base = (m[:, None] * self.z[None, :] % self.n_points) / self.n_points
        w = base + self.offsets[shift]
        w -= np.floor(w)
        return np.abs(2.0 * w - 1.0)


@dataclass(frozen=True, eq=False)
class SovProblem:
    """Reordered, centred problem ready for the separation-of-variables integrand."""

    chol: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    perm: np.ndarray


def _interval_mass(d, e):
    # upper-tail intervals are evaluated by reflection to keep precision
    if d > 0:
        return special.std_normal_cdf(-d) - special.std_normal_cdf(-e)
    return special.std_normal_cdf(e) - special.std_normal_cdf(d)


def _truncated_mean(d, e, mass):
    if mass > 1e-280:
        return (special.std_normal_pdf(d) - special.std_normal_pdf(e)) / mass
    if np.isfinite(d) and np.isfinite(e):
        return 0.5 * (d + e)
    return d if np.isfinite(d) else e


def reorder_variables(lower, upper, delta, sigma, *, reorder: bool = True) -> SovProblem:
    """Centre the limits, order the variables and factor the scale matrix.

    At step ``i`` the remaining variable with the smallest conditional
    probability ``Phi(e) - Phi(d)`` is moved to position ``i``; earlier
    variables are replaced by their conditional expectations. The Cholesky
    factor is built column by column in the chosen order. With
    ``reorder=False`` the original order is kept.
    """
    a = np.array(lower, dtype=float) - delta
    b = np.array(upper, dtype=float) - delta
    s = np.array(sigma, dtype=float)
    k = a.size
    floor = PD_TOLERANCE * float(np.max(np.diag(s)))
    chol = np.zeros((k, k))
    y = np.zeros(k)
    perm = np.arange(k)
    for i in range(k):
        cond_var = np.diag(s)[i:] - np.sum(chol[i:, :i] ** 2, axis=1)
        if (cond_var <= floor).any():
            raise NotPositiveDefinite("sigma is not positive-definite")
        sd = np.sqrt(cond_var)
        shift = chol[i:, :i] @ y[:i]
        dh = (a[i:] - shift) / sd
        eh = (b[i:] - shift) / sd
        masses = np.array([_interval_mass(d, e) for d, e in zip(dh, eh)])
        j = int(np.argmin(masses)) if reorder else 0
        if j:
            p, q = i, i + j
            a[[p, q]] = a[[q, p]]
            b[[p, q]] = b[[q, p]]
            perm[[p, q]] = perm[[q, p]]
            s[[p, q], :] = s[[q, p], :]
            s[:, [p, q]] = s[:, [q, p]]
            chol[[p, q], :] = chol[[q, p], :]
        chol[i, i] = sd[j]
        if i + 1 < k:
            chol[i + 1:, i] = (s[i + 1:, i] - chol[i + 1:, :i] @ chol[i, :i]) / chol[i, i]
        y[i] = _truncated_mean(dh[j], eh[j], masses[j])
    return SovProblem(chol, a, b, perm)


def sov_integrand(chol: np.ndarray, a, b, w: np.ndarray) -> np.ndarray:
    """Evaluate the separation-of-variables integrand at points ``w``.

    ``a`` and ``b`` are the centred limits in integration order, either of
    shape ``(k,)`` or ``(n, k)`` for per-point limits. ``w`` has shape
    ``(n, k - 1)``. Infinite limits give ``d = 0`` / ``e = 1`` exactly.
    """
    k = chol.shape[0]
    n = w.shape[0]
    a = np.broadcast_to(a, (n, k))
    b = np.broadcast_to(b, (n, k))
    prod = np.ones(n)
    y = np.empty((n, max(k - 1, 0)))
    for i in range(k):
        shift = y[:, :i] @ chol[i, :i] if i else 0.0
        d = special.std_normal_cdf((a[:, i] - shift) / chol[i, i])
        e = special.std_normal_cdf((b[:, i] - shift) / chol[i, i])
        width = np.maximum(e - d, 0.0)
        prod *= width
        if i < k - 1:
            y[:, i] = special.std_normal_inv_cdf_clamped(d + w[:, i] * width)
    return prod


def _aggregate(shift_means: np.ndarray, fallback_sd: float, n_points: int,
               alpha: float) -> ProbabilityEstimate:
    value = float(np.mean(shift_means))
    if shift_means.size > 1:
        stderr = float(np.std(shift_means, ddof=1) / np.sqrt(shift_means.size))
    else:
        # one shift has no between-shift spread; fall back to plain MC
        stderr = fallback_sd / np.sqrt(n_points)
    return ProbabilityEstimate(min(max(value, 0.0), 1.0), alpha * stderr)


def _run_shifts(rule: LatticeRule, fn: Callable[[np.ndarray], np.ndarray],
                qmc: QmcConfig, workers: int) -> ProbabilityEstimate:
    def one(j):
        vals = fn(rule.points(j))
        return vals.mean(), vals.std(ddof=1) if vals.size > 1 else 0.0

    if workers > 1 and qmc.shifts > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(one, range(qmc.shifts)))
    else:
        out = [one(j) for j in range(qmc.shifts)]
    means = np.array([m for m, _ in out])
    return _aggregate(means, out[0][1], rule.n_points, qmc.alpha)


def _empty(a, b) -> bool:
    return bool((np.asarray(a) >= np.asarray(b)).any())


def _mvn(a, b, delta, sigma, chol, qmc: QmcConfig, seed: int, workers: int = 1,
         reorder: bool = True) -> ProbabilityEstimate:
    """Normal rectangle probability on already validated inputs.

    Empty rectangles (``a_i >= b_i`` for some ``i``) give exactly 0.
    """
    if _empty(a, b):
        return ProbabilityEstimate(0.0, 0.0)
    k = delta.size
    if k == 1:
        sd = chol[0, 0]
        lo = special.std_normal_cdf((a[0] - delta[0]) / sd)
        hi = special.std_normal_cdf((b[0] - delta[0]) / sd)
        return ProbabilityEstimate(float(min(max(hi - lo, 0.0), 1.0)), 0.0)
    if np.isneginf(a).all() and np.isposinf(b).all():
        return ProbabilityEstimate(1.0, 0.0)
    prob = reorder_variables(a, b, delta, sigma, reorder=reorder)
    rule = LatticeRule.build(k - 1, qmc, seed)
    return _run_shifts(rule, lambda w: sov_integrand(prob.chol, prob.lower, prob.upper, w),
                       qmc, workers)


def _mvt(a, b, delta, sigma, chol, nu: float, qmc: QmcConfig, seed: int,
         workers: int = 1, reorder: bool = True) -> ProbabilityEstimate:
    if _empty(a, b):
        return ProbabilityEstimate(0.0, 0.0)
    k = delta.size
    if k == 1:
        sd = chol[0, 0]
        lo = special.student_t_cdf((a[0] - delta[0]) / sd, nu)
        hi = special.student_t_cdf((b[0] - delta[0]) / sd, nu)
        return ProbabilityEstimate(float(min(max(hi - lo, 0.0), 1.0)), 0.0)
    if np.isneginf(a).all() and np.isposinf(b).all():
        return ProbabilityEstimate(1.0, 0.0)
    prob = reorder_variables(a, b, delta, sigma, reorder=reorder)
    rule = LatticeRule.build(k, qmc, seed)

    def integrand(w):
        s = special.chi_quantile_clamped(w[:, 0], nu) / np.sqrt(nu)
        return sov_integrand(prob.chol, s[:, None] * prob.lower, s[:, None] * prob.upper,
                             w[:, 1:])

    return _run_shifts(rule, integrand, qmc, workers)


class _NormalizerCache:
    """Normalizing constants keyed by distribution, box, lattice settings and seed."""

    def __init__(self, maxsize: int = 256):
        self._data: dict = {}
        self._lock = threading.Lock()
        self.maxsize = maxsize

    @staticmethod
    def key(spec, qmc: QmcConfig, seed: int):
        return (spec.delta.tobytes(), spec.sigma.tobytes(), spec.sigma.shape, spec.nu,
                spec.lower_trunc.tobytes(), spec.upper_trunc.tobytes(),
                qmc.shifts, qmc.samples, qmc.alpha, seed)

    def get(self, key, compute):
        with self._lock:
            if key in self._data:
                return self._data[key]
        value = compute()
        with self._lock:
            if len(self._data) >= self.maxsize:
                self._data.pop(next(iter(self._data)))
            self._data[key] = value
        return value

    def clear(self):
        with self._lock:
            self._data.clear()


normalizer_cache = _NormalizerCache()


def _parent(spec, a, b, qmc, seed, workers):
    if spec.nu is None:
        return _mvn(a, b, spec.delta, spec.sigma, spec.chol, qmc, seed, workers)
    return _mvt(a, b, spec.delta, spec.sigma, spec.chol, spec.nu, qmc, seed, workers)


def normalizing_constant(spec, qmc: QmcConfig = DEFAULT_QMC, seed: int = 0,
                         workers: int = 1) -> ProbabilityEstimate:
    """Parent probability of the truncation box of ``spec`` (cached).

    Raises :class:`DegenerateTruncation` when the estimate does not exceed
    its own error bound.
    """
    key = _NormalizerCache.key(spec, qmc, seed)
    est = normalizer_cache.get(
        key, lambda: _parent(spec, spec.lower_trunc, spec.upper_trunc, qmc, seed, workers))
    if est.value <= est.error:
        raise DegenerateTruncation(
            f"truncation box has negligible probability ({est.value:.3g} +/- {est.error:.3g})")
    return est


def _truncated(spec, a, b, qmc, seed, workers) -> ProbabilityEstimate:
    den = normalizing_constant(spec, qmc, seed, workers)
    lo = np.maximum(a, spec.lower_trunc)
    hi = np.minimum(b, spec.upper_trunc)
    if _empty(lo, hi):
        return ProbabilityEstimate(0.0, 0.0)
    if np.array_equal(lo, spec.lower_trunc) and np.array_equal(hi, spec.upper_trunc):
        num = den
    else:
        num = _parent(spec, lo, hi, qmc, seed, workers)
    ratio = num.value / den.value
    err = (num.error + ratio * den.error) / den.value
    return ProbabilityEstimate(min(max(ratio, 0.0), 1.0), max(err, 0.0))


def _qmc(qmc: Optional[QmcConfig]) -> QmcConfig:
    return DEFAULT_QMC if qmc is None else qmc


def mvn_probability(lower, upper, delta, sigma, qmc: Optional[QmcConfig] = None,
                    seed: int = 0, *, workers: int = 1,
                    reorder: bool = True) -> ProbabilityEstimate:
    """Probability that a normal vector falls in the box ``[lower, upper]``.

    Parameters
    ----------
    lower, upper : array_like, shape (k,)
        Integration limits; ``-inf``/``inf`` allowed, ``lower < upper``.
    delta : array_like, shape (k,)
        Mean vector.
    sigma : array_like, shape (k, k)
        Covariance matrix.
    qmc : QmcConfig, optional
        Lattice settings; defaults to 12 shifts of 1000 samples, alpha 3.
    seed : int
        Seed for the random shifts. Same seed and inputs give the same
        estimate bit for bit, whatever ``workers`` is.
    workers : int
        Number of threads over which shifts are spread.

    Returns
    -------
    ProbabilityEstimate
        ``value`` clamped to ``[0, 1]`` and an ``alpha``-scaled error bound.
        Dimension 1 is evaluated in closed form with error 0.
    """
    spec = validate_spec(delta, sigma)
    a, b = check_bounds(lower, upper, spec.k)
    return _mvn(a, b, spec.delta, spec.sigma, spec.chol, _qmc(qmc), seed, workers, reorder)


def mvt_probability(lower, upper, delta, sigma, nu, qmc: Optional[QmcConfig] = None,
                    seed: int = 0, *, workers: int = 1,
                    reorder: bool = True) -> ProbabilityEstimate:
    """Box probability of the location-shifted multivariate t distribution.

    ``delta`` holds the non-centrality (location) parameters and ``nu`` the
    degrees of freedom, which need not be integer. See
    :func:`mvn_probability` for the remaining arguments.
    """
    spec = validate_spec(delta, sigma, nu)
    a, b = check_bounds(lower, upper, spec.k)
    return _mvt(a, b, spec.delta, spec.sigma, spec.chol, spec.nu, _qmc(qmc), seed,
                workers, reorder)


def tmvn_probability(lower, upper, delta, sigma, lower_trunc, upper_trunc,
                     qmc: Optional[QmcConfig] = None, seed: int = 0, *,
                     workers: int = 1) -> ProbabilityEstimate:
    """Box probability of a normal vector truncated to ``[lower_trunc, upper_trunc]``.

    The numerator is the parent probability of the box clipped to the
    truncation region and the denominator that of the truncation region
    itself, both computed with the same seed. The error bound follows the
    first-order quotient rule.
    """
    spec = validate_spec(delta, sigma, None, lower_trunc, upper_trunc)
    a, b = check_bounds(lower, upper, spec.k)
    return _truncated(spec, a, b, _qmc(qmc), seed, workers)


def tmvt_probability(lower, upper, delta, sigma, nu, lower_trunc, upper_trunc,
                     qmc: Optional[QmcConfig] = None, seed: int = 0, *,
                     workers: int = 1) -> ProbabilityEstimate:
    """Truncated counterpart of :func:`mvt_probability`."""
    spec = validate_spec(delta, sigma, nu, lower_trunc, upper_trunc)
    a, b = check_bounds(lower, upper, spec.k)
    return _truncated(spec, a, b, _qmc(qmc), seed, workers)


def spec_probability(spec, lower, upper, qmc: Optional[QmcConfig] = None, seed: int = 0,
                     workers: int = 1) -> ProbabilityEstimate:
    """Probability of ``[lower, upper]`` for any validated spec.

    Empty boxes are allowed here and give 0; this is the entry point used by
    the quantile search.
    """
    qmc = _qmc(qmc)
    a = np.asarray(lower, dtype=float)
    b = np.asarray(upper, dtype=float)
    if spec.truncated:
        return _truncated(spec, a, b, qmc, seed, workers)
    return _parent(spec, a, b, qmc, seed, workers)
