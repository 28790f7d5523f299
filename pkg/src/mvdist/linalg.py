"""Matrix square roots ``R`` with ``R @ R.T == sigma``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PD_TOLERANCE, Method, NotPositiveDefinite, check_sigma


@dataclass(frozen=True, eq=False)
class MatrixFactor:
    entries: np.ndarray
    method: Method


def _pivot_floor(sigma: np.ndarray) -> float:
    return PD_TOLERANCE * float(np.max(np.diag(sigma)))


def cholesky_lower(sigma) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == sigma``.

    Every pivot ``L[i, i] ** 2`` must exceed ``1e-10`` times the largest
    diagonal entry of ``sigma``, otherwise :class:`NotPositiveDefinite`.
    """
    s = np.asarray(sigma, dtype=float)
    if np.max(np.diag(s)) <= 0:
        raise NotPositiveDefinite("sigma has no positive diagonal entry")
    try:
        chol = np.linalg.cholesky(s)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("sigma is not positive-definite") from None
    pivots = np.diag(chol) ** 2
    if (pivots <= _pivot_floor(s)).any():
        raise NotPositiveDefinite(
            f"sigma is numerically singular (smallest Cholesky pivot {pivots.min():.3g})")
    return chol


def _ordered_eigh(sigma: np.ndarray):
    w, v = np.linalg.eigh(sigma)
    lead = np.argmax(np.abs(v), axis=0)
    # descending eigenvalue, ties by index of the dominant component
    order = np.lexsort((lead, -w))
    w, v, lead = w[order], v[:, order], lead[order]
    signs = np.sign(v[lead, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return w, v * signs


def matrix_sqrt(sigma, method="cholesky") -> MatrixFactor:
    """Square root of ``sigma`` by Cholesky, eigen or singular value decomposition.

    Parameters
    ----------
    sigma : array_like, shape (k, k)
        Symmetric positive-definite matrix.
    method : {"cholesky", "eigen", "svd"}
        ``eigen`` gives ``V diag(sqrt(lambda))``; ``svd`` gives
        ``U diag(sqrt(s))``, which for an SPD matrix coincides with the
        eigen route and is computed that way.

    Returns
    -------
    MatrixFactor
    """
    method = Method.parse(method)
    s = check_sigma(sigma)
    if method is Method.CHOLESKY:
        return MatrixFactor(cholesky_lower(s), method)
    w, v = _ordered_eigh(s)
    if (w <= _pivot_floor(s)).any():
        raise NotPositiveDefinite(
            f"sigma is not positive-definite (smallest eigenvalue {w.min():.3g})")
    return MatrixFactor(v * np.sqrt(w), method)
