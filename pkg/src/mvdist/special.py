"""Scalar kernels: normal CDF and quantile, chi quantile, log-gamma.

All functions broadcast over numpy arrays.
"""

from __future__ import annotations

import numpy as np
from scipy import special as sc

from .core import DomainError

P_MIN = 1e-300
P_MAX = 1.0 - 1e-16


def std_normal_cdf(x):
    """Standard normal CDF; ``-inf`` maps to 0 and ``inf`` to 1."""
    return sc.ndtr(x)


def std_normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)


def _check_unit(p, name="p"):
    p = np.asarray(p, dtype=float)
    if np.isnan(p).any() or (p <= 0).any() or (p >= 1).any():
        raise DomainError(f"{name} must lie strictly between 0 and 1")
    return p


def _clamp(p):
    return np.clip(p, P_MIN, P_MAX)


def std_normal_inv_cdf(p):
    """Standard normal quantile for ``0 < p < 1``."""
    return sc.ndtri(_check_unit(p))


def std_normal_inv_cdf_clamped(p):
    """Quantile with ``p`` clamped into ``[1e-300, 1 - 1e-16]``; no domain check.

    Used inside the integrand, where ``p`` may land on 0 or 1 through
    rounding.
    """
    return sc.ndtri(_clamp(p))


def chi_quantile(p, nu):
    """Quantile of the chi distribution (square root of a chi-square variate)."""
    p = _check_unit(p)
    if not np.all(np.asarray(nu) > 0):
        raise DomainError("degrees of freedom must be positive")
    return chi_quantile_clamped(p, nu)


def chi_quantile_clamped(p, nu):
    return np.sqrt(2.0 * sc.gammaincinv(0.5 * np.asarray(nu, dtype=float), _clamp(p)))


def chi2_quantile_clamped(p, nu):
    return 2.0 * sc.gammaincinv(0.5 * np.asarray(nu, dtype=float), _clamp(p))


def student_t_cdf(x, nu):
    return sc.stdtr(nu, x)


def log_gamma(x):
    x = np.asarray(x, dtype=float)
    if np.isnan(x).any() or (x <= 0).any():
        raise DomainError("log_gamma requires x > 0")
    out = sc.gammaln(x)
    return float(out) if out.ndim == 0 else out
