"""Seeded pseudo-random draws for the four families.

Normal variates come from the inverse-CDF transform of PCG64 uniforms and
chi-square variates from the chi-square quantile of one uniform per row, so
each row consumes a fixed number of uniforms: ``k`` for the normal and
``k + 1`` for the t family. Truncated families use rejection sampling with
proposals drawn from the same stream, so a box covering the whole space
reproduces the untruncated sampler exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AcceptanceTooLow, Method, ValidationError, validate_spec
from .linalg import matrix_sqrt
from .special import chi2_quantile_clamped, std_normal_inv_cdf_clamped

MAX_ATTEMPTS = 10_000_000


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    draws: np.ndarray
    seed: int
    method: Method

    def __array__(self, dtype=None, copy=None):
        return self.draws if dtype is None else self.draws.astype(dtype)

    @property
    def shape(self):
        return self.draws.shape


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    return int(n)


def _proposals(rng, n, spec, root):
    k = spec.k
    if spec.nu is None:
        u = rng.random((n, k))
        return spec.delta + std_normal_inv_cdf_clamped(u) @ root.T
    u = rng.random((n, k + 1))
    y = std_normal_inv_cdf_clamped(u[:, :k]) @ root.T
    v = chi2_quantile_clamped(u[:, k], spec.nu)
    return spec.delta + y * np.sqrt(spec.nu / v)[:, None]


def _draw(spec, n, method, seed, max_attempts):
    n = _check_n(n)
    method = Method.parse(method)
    root = matrix_sqrt(spec.sigma, method).entries
    rng = np.random.default_rng(seed)
    if not spec.truncated:
        return SampleMatrix(_proposals(rng, n, spec, root), seed, method)

    if int(max_attempts) != max_attempts or max_attempts < 1:
        raise ValidationError(f"max_attempts must be a positive integer, got {max_attempts!r}")
    accepted = []
    n_acc = 0
    used = 0
    batch = n
    while n_acc < n:
        batch = min(batch, max_attempts - used)
        if batch <= 0:
            rate = n_acc / used if used else 0.0
            raise AcceptanceTooLow(
                f"only {n_acc} of {n} draws accepted after {used} proposals "
                f"(acceptance rate {rate:.3g})")
        x = _proposals(rng, batch, spec, root)
        used += batch
        keep = np.all((x >= spec.lower_trunc) & (x <= spec.upper_trunc), axis=1)
        x = x[keep]
        accepted.append(x)
        n_acc += x.shape[0]
        rate = max(n_acc / used, 1.0 / used)
        batch = int(min(max(1.2 * (n - n_acc) / rate, 1024), 1_000_000))
    return SampleMatrix(np.concatenate(accepted)[:n], seed, method)


def sample_mvn(n, delta, sigma, method="cholesky", seed: int = 0) -> SampleMatrix:
    """Draw ``n`` rows ``delta + R z`` with ``R R^T = sigma`` and ``z`` standard normal.

    Examples
    --------
    >>> sample_mvn(3, [0.0, 0.0], [[1.0, 0.5], [0.5, 1.0]], seed=1).shape
    (3, 2)
    """
    return _draw(validate_spec(delta, sigma), n, method, seed, MAX_ATTEMPTS)


def sample_mvt(n, delta, sigma, nu, method="cholesky", seed: int = 0) -> SampleMatrix:
    """Draw ``n`` rows ``delta + y sqrt(nu / v)`` with ``y ~ N(0, sigma)``, ``v ~ chi2(nu)``."""
    return _draw(validate_spec(delta, sigma, nu), n, method, seed, MAX_ATTEMPTS)


def sample_tmvn(n, delta, sigma, lower_trunc, upper_trunc, method="cholesky",
                seed: int = 0, max_attempts: int = MAX_ATTEMPTS) -> SampleMatrix:
    """Rejection sampler for the normal distribution truncated to a closed box.

    Raises
    ------
    AcceptanceTooLow
        If more than ``max_attempts`` proposals are needed in total.
    """
    spec = validate_spec(delta, sigma, None, lower_trunc, upper_trunc)
    return _draw(spec, n, method, seed, max_attempts)


def sample_tmvt(n, delta, sigma, nu, lower_trunc, upper_trunc, method="cholesky",
                seed: int = 0, max_attempts: int = MAX_ATTEMPTS) -> SampleMatrix:
    spec = validate_spec(delta, sigma, nu, lower_trunc, upper_trunc)
    return _draw(spec, n, method, seed, max_attempts)
