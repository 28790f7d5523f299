"""Tabular data for density contour plots and truncated orthant curves."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .core import QmcConfig, UnsupportedDimension, ValidationError, as_vector
from .densities import mvn_density, mvt_density, tmvn_density, tmvt_density
from .qmc import tmvn_probability

FAMILIES = ("mvnormalden", "mvtden", "tmvnormalden", "tmvtden")


def axis(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive grid ``start, start + step, ..., stop`` without drift."""
    if not step > 0 or not stop >= start:
        raise ValidationError("grid needs step > 0 and stop >= start")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 12)


def density_grid(family: str, delta, sigma, nu=1.0, lower_trunc=None, upper_trunc=None,
                 start=-3.0, stop=3.0, step=0.1, qmc: Optional[QmcConfig] = None,
                 seed: int = 0) -> np.ndarray:
    """Density of one family on a square grid in two dimensions.

    Returns an array of shape ``(n * n, 3)`` with columns ``x1, x2, density``,
    with ``x1`` varying slowest.
    """
    if family not in FAMILIES:
        raise ValidationError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if as_vector(delta, "delta").size != 2:
        raise UnsupportedDimension("density grids are only available for k = 2")
    g = axis(start, stop, step)
    x1, x2 = np.meshgrid(g, g, indexing="ij")
    pts = np.column_stack([x1.ravel(), x2.ravel()])
    if family == "mvnormalden":
        dens = mvn_density(pts, delta, sigma)
    elif family == "mvtden":
        dens = mvt_density(pts, delta, sigma, nu)
    elif family == "tmvnormalden":
        dens = tmvn_density(pts, delta, sigma, lower_trunc, upper_trunc, qmc=qmc, seed=seed)
    else:
        dens = tmvt_density(pts, delta, sigma, nu, lower_trunc, upper_trunc, qmc=qmc, seed=seed)
    return np.column_stack([pts, dens])


def truncation_curve(delta, sigma, t_values, lower=None, upper=None,
                     qmc: Optional[QmcConfig] = None, seed: int = 0,
                     workers: int = 1) -> np.ndarray:
    """Truncated normal box probability as the common lower truncation point moves.

    For each ``t`` the distribution is truncated to ``[t, inf)^k`` and the
    probability of ``[lower, upper]`` (the positive orthant by default) is
    evaluated. Returns rows ``t, probability, error``.
    """
    k = as_vector(delta, "delta").size
    lower = np.zeros(k) if lower is None else lower
    upper = np.full(k, np.inf) if upper is None else upper
    rows = []
    for t in np.asarray(t_values, dtype=float):
        est = tmvn_probability(lower, upper, delta, sigma, np.full(k, t), np.full(k, np.inf),
                               qmc, seed, workers=workers)
        rows.append((t, est.value, est.error))
    return np.array(rows)
