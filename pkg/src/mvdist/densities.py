"""Densities of the normal, t, truncated normal and truncated t families.

Every density is computed in log space through the Cholesky factor of the
scale matrix and exponentiated last. ``x`` may be a single point of shape
``(k,)`` or a stack of points of shape ``(n, k)``.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.linalg import solve_triangular

from .core import DimensionMismatch, QmcConfig, ValidationError, validate_spec
from .qmc import DEFAULT_QMC, normalizing_constant
from .special import log_gamma

_LOG_2PI = np.log(2.0 * np.pi)


def _points(x, k):
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.ndim != 2 or pts.shape[1] != k:
        raise DimensionMismatch(f"x must have {k} coordinates, got shape {np.shape(x)}")
    if not np.isfinite(pts).all():
        raise ValidationError("x must be finite")
    return pts, single


def _mahalanobis(pts, spec):
    sol = solve_triangular(spec.chol, (pts - spec.delta).T, lower=True)
    return np.sum(sol * sol, axis=0)


def _log_det(spec):
    return 2.0 * np.sum(np.log(np.diag(spec.chol)))


def _mvn_logpdf(pts, spec):
    k = spec.k
    return -0.5 * (k * _LOG_2PI + _log_det(spec) + _mahalanobis(pts, spec))


def _mvt_logpdf(pts, spec):
    k, nu = spec.k, spec.nu
    const = (log_gamma(0.5 * (nu + k)) - log_gamma(0.5 * nu)
             - 0.5 * (k * np.log(nu * np.pi) + _log_det(spec)))
    return const - 0.5 * (nu + k) * np.log1p(_mahalanobis(pts, spec) / nu)


def _inside(pts, spec):
    # closed box: points on a truncation limit count as inside
    return np.all((pts >= spec.lower_trunc) & (pts <= spec.upper_trunc), axis=1)


def _finish(logpdf, single, log_scale):
    out = logpdf if log_scale else np.exp(logpdf)
    return float(out[0]) if single else out


def _truncated_logpdf(pts, spec, parent, qmc, seed):
    logpdf = np.full(pts.shape[0], -np.inf)
    inside = _inside(pts, spec)
    if inside.any():
        norm = normalizing_constant(spec, qmc, seed)
        logpdf[inside] = parent(pts[inside], spec) - np.log(norm.value)
    return logpdf


def mvn_density(x, delta, sigma, log_scale: bool = False):
    """Multivariate normal density at ``x``.

    Examples
    --------
    >>> round(mvn_density([0, 0], [0, 0], [[1, 0], [0, 1]]), 7)
    0.1591549
    """
    spec = validate_spec(delta, sigma)
    pts, single = _points(x, spec.k)
    return _finish(_mvn_logpdf(pts, spec), single, log_scale)


def mvt_density(x, delta, sigma, nu, log_scale: bool = False):
    """Location-shifted multivariate t density with ``nu`` degrees of freedom."""
    spec = validate_spec(delta, sigma, nu)
    pts, single = _points(x, spec.k)
    return _finish(_mvt_logpdf(pts, spec), single, log_scale)


def tmvn_density(x, delta, sigma, lower_trunc, upper_trunc, log_scale: bool = False,
                 qmc: Optional[QmcConfig] = None, seed: int = 0):
    """Normal density truncated to the closed box ``[lower_trunc, upper_trunc]``.

    Zero outside the box (``-inf`` on the log scale). Inside, the parent
    density is divided by the box probability, which is estimated once per
    (parameters, lattice settings, seed) and cached.
    """
    spec = validate_spec(delta, sigma, None, lower_trunc, upper_trunc)
    pts, single = _points(x, spec.k)
    logpdf = _truncated_logpdf(pts, spec, _mvn_logpdf, qmc or DEFAULT_QMC, seed)
    return _finish(logpdf, single, log_scale)


def tmvt_density(x, delta, sigma, nu, lower_trunc, upper_trunc, log_scale: bool = False,
                 qmc: Optional[QmcConfig] = None, seed: int = 0):
    """Truncated counterpart of :func:`mvt_density`."""
    spec = validate_spec(delta, sigma, nu, lower_trunc, upper_trunc)
    pts, single = _points(x, spec.k)
    logpdf = _truncated_logpdf(pts, spec, _mvt_logpdf, qmc or DEFAULT_QMC, seed)
    return _finish(logpdf, single, log_scale)
