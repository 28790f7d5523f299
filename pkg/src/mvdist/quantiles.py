"""Equicoordinate quantiles by bracketed interval bisection.

The objective ``P(q) - p`` is evaluated with the same lattice shifts at every
step of one search, so it is a fixed function of ``q`` and bisection is
well defined even though each probability is a randomized estimate.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy import special as sc

from .core import (
    BisectionConfig,
    DomainError,
    QmcConfig,
    QuantileResult,
    Tail,
    validate_spec,
)
from .qmc import DEFAULT_QMC, spec_probability

MAX_EXPANSIONS = 60


def _check_p(p) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie strictly between 0 and 1, got {p}")
    return p


def _start(spec, p, tail):
    j = int(np.argmin(np.diag(spec.sigma)))
    sd = float(np.sqrt(spec.sigma[j, j]))
    if spec.nu is None:
        inv = sc.ndtri
    else:
        inv = lambda x: sc.stdtrit(spec.nu, x)  # noqa: E731
    if tail is Tail.LOWER:
        q0 = spec.delta[j] + sd * inv(p)
    elif tail is Tail.UPPER:
        q0 = spec.delta[j] + sd * inv(1.0 - p)
    else:
        q0 = abs(spec.delta[j]) + sd * inv(0.5 * (1.0 + p))
    return float(q0), sd


def _domain(spec, tail):
    lo, hi = -np.inf, np.inf
    if spec.truncated:
        lo, hi = float(np.min(spec.lower_trunc)), float(np.max(spec.upper_trunc))
    if tail is Tail.BOTH:
        hi = max(abs(lo), abs(hi))
        lo = 0.0
    return lo, hi


def equicoordinate_quantile(spec, p, cfg: Optional[BisectionConfig] = None,
                            qmc: Optional[QmcConfig] = None, seed: int = 0,
                            workers: int = 1) -> QuantileResult:
    """Solve ``P(q) = p`` for the equicoordinate quantile of a validated spec.

    ``P`` depends on ``cfg.tail``: ``lower`` uses the box ``(-inf, q]^k``,
    ``upper`` the box ``[q, inf)^k`` and ``both`` the box ``[-q, q]^k`` with
    ``q >= 0``. For truncated families the search is confined to
    ``[min(l), max(u)]``.

    The bracket starts at the univariate quantile of the coordinate with
    the smallest scale and grows by doubling steps (at most 60). Bisection
    stops when ``|P(q) - p| <= tolerance`` or the bracket is narrower than
    ``tolerance``.
    """
    cfg = cfg or BisectionConfig()
    qmc = qmc or DEFAULT_QMC
    p = _check_p(p)
    tol = cfg.tolerance
    tail = cfg.tail
    k = spec.k
    ones = np.ones(k)
    sign = -1.0 if tail is Tail.UPPER else 1.0

    def objective(q):
        if tail is Tail.LOWER:
            a, b = np.full(k, -np.inf), q * ones
        elif tail is Tail.UPPER:
            a, b = q * ones, np.full(k, np.inf)
        else:
            a, b = -q * ones, q * ones
        est = spec_probability(spec, a, b, qmc, seed, workers)
        return est.value - p, est.error

    lo_lim, hi_lim = _domain(spec, tail)
    q0, step = _start(spec, p, tail)
    q0 = min(max(q0, lo_lim), hi_lim)
    f0, e0 = objective(q0)
    if abs(f0) <= tol:
        return QuantileResult(q0, e0, 0, f0, 0)

    # g(q) = sign * f(q) is non-decreasing in q
    lo = hi = q0
    found = False
    up = sign * f0 < 0
    for _ in range(MAX_EXPANSIONS):
        if up:
            cand = min(hi + step, hi_lim)
            f, e = objective(cand)
            if abs(f) <= tol:
                return QuantileResult(cand, e, 0, f, 0)
            if sign * f > 0:
                lo, hi, found = hi, cand, True
                break
            hi = cand
            if cand >= hi_lim:
                break
        else:
            cand = max(lo - step, lo_lim)
            f, e = objective(cand)
            if abs(f) <= tol:
                return QuantileResult(cand, e, 0, f, 0)
            if sign * f < 0:
                lo, hi, found = cand, lo, True
                break
            lo = cand
            if cand <= lo_lim:
                break
        step *= 2.0
    if not found:
        q = hi if up else lo
        return QuantileResult(q, float("inf"), 2, f, 0)

    it = 0
    while it < cfg.itermax:
        mid = 0.5 * (lo + hi)
        f, e = objective(mid)
        it += 1
        if abs(f) <= tol or hi - lo <= tol or mid in (lo, hi):
            break
        if sign * f < 0:
            lo = mid
        else:
            hi = mid
    flag = 0 if abs(f) <= tol else 1
    return QuantileResult(mid, 0.5 * (hi - lo) + e, flag, f, it)


def mvn_quantile(p, delta, sigma, cfg: Optional[BisectionConfig] = None,
                 qmc: Optional[QmcConfig] = None, seed: int = 0, *,
                 workers: int = 1) -> QuantileResult:
    """Equicoordinate quantile of the multivariate normal distribution.

    Examples
    --------
    >>> res = mvn_quantile(0.975, [0.0], [[1.0]])
    >>> round(res.quantile, 4), res.flag
    (1.96, 0)
    """
    spec = validate_spec(delta, sigma)
    return equicoordinate_quantile(spec, p, cfg, qmc, seed, workers)


def mvt_quantile(p, delta, sigma, nu, cfg: Optional[BisectionConfig] = None,
                 qmc: Optional[QmcConfig] = None, seed: int = 0, *,
                 workers: int = 1) -> QuantileResult:
    spec = validate_spec(delta, sigma, nu)
    return equicoordinate_quantile(spec, p, cfg, qmc, seed, workers)


def tmvn_quantile(p, delta, sigma, lower_trunc, upper_trunc,
                  cfg: Optional[BisectionConfig] = None, qmc: Optional[QmcConfig] = None,
                  seed: int = 0, *, workers: int = 1) -> QuantileResult:
    spec = validate_spec(delta, sigma, None, lower_trunc, upper_trunc)
    return equicoordinate_quantile(spec, p, cfg, qmc, seed, workers)


def tmvt_quantile(p, delta, sigma, nu, lower_trunc, upper_trunc,
                  cfg: Optional[BisectionConfig] = None, qmc: Optional[QmcConfig] = None,
                  seed: int = 0, *, workers: int = 1) -> QuantileResult:
    spec = validate_spec(delta, sigma, nu, lower_trunc, upper_trunc)
    return equicoordinate_quantile(spec, p, cfg, qmc, seed, workers)
