import math

import numpy as np
import pytest
from scipy.special import gammaln

from conftest import equicorrelated
from mvdist import (
    DegenerateTruncation,
    QmcConfig,
    mvn_density,
    mvn_probability,
    mvt_density,
    tmvn_density,
    tmvt_density,
)
from mvdist.qmc import normalizer_cache

S2 = [[1, 0.5], [0.5, 1]]
BOX = ([-1.5, -1.5], [1.5, 1.5])


def _mvn_direct(x, d, s):
    # explicit inverse and determinant, independent of the Cholesky route
    x, d, s = map(np.asarray, (x, d, s))
    r = x - d
    k = r.size
    return np.exp(-0.5 * r @ np.linalg.inv(s) @ r) / np.sqrt((2 * np.pi) ** k * np.linalg.det(s))


def _mvt_direct(x, d, s, nu):
    x, d, s = map(np.asarray, (x, d, s))
    r = x - d
    k = r.size
    q = r @ np.linalg.inv(s) @ r
    c = np.exp(gammaln((nu + k) / 2) - gammaln(nu / 2)) / np.sqrt((nu * np.pi) ** k * np.linalg.det(s))
    return c * (1 + q / nu) ** (-(nu + k) / 2)


def test_mvn_density_values():
    assert abs(mvn_density([0, 0], [0, 0], np.eye(2)) - 1 / (2 * np.pi)) <= 1e-15
    assert abs(mvn_density([0, 0], [0, 0], S2) - 1 / (2 * np.pi * np.sqrt(0.75))) <= 1e-14
    assert abs(mvn_density([1], [0], [[1]]) - np.exp(-0.5) / np.sqrt(2 * np.pi)) <= 1e-15


def test_mvt_density_values():
    assert abs(mvt_density([0, 0], [0, 0], np.eye(2), 1) - 1 / (2 * np.pi)) <= 1e-14
    assert abs(mvt_density([0], [0], [[1]], 1) - 1 / np.pi) <= 1e-15
    assert abs(mvt_density([1], [0], [[1]], 1) - 1 / (2 * np.pi)) <= 1e-15


@pytest.mark.parametrize("seed", range(5))
def test_densities_match_direct_formula(seed):
    rng = np.random.default_rng(seed)
    k = 3
    a = rng.normal(size=(k, k))
    s = a @ a.T + 0.5 * np.eye(k)
    d = rng.normal(size=k)
    x = rng.normal(size=k)
    assert np.isclose(mvn_density(x, d, s), _mvn_direct(x, d, s), rtol=1e-12)
    assert np.isclose(mvt_density(x, d, s, 3.7), _mvt_direct(x, d, s, 3.7), rtol=1e-12)


def test_vectorised_points():
    pts = np.array([[0, 0], [1, -1], [2, 0.5]])
    vals = mvn_density(pts, [0, 0], S2)
    assert vals.shape == (3,)
    assert np.allclose(vals, [mvn_density(p, [0, 0], S2) for p in pts])


def test_tmvn_density_univariate():
    # phi(0) / (Phi(1.5) - Phi(-1.5)), 40-digit oracle
    assert abs(tmvn_density([0], [0], [[1]], [-1.5], [1.5]) - 0.46046735029987583) <= 1e-12
    assert tmvn_density([2], [0], [[1]], [-1.5], [1.5]) == 0.0
    assert tmvn_density([2], [0], [[1]], [-1.5], [1.5], log_scale=True) == -np.inf


def test_tmvt_density_univariate():
    # Cauchy: (1/pi) / (2 arctan(1.5) / pi)
    assert abs(tmvt_density([0], [0], [[1]], 1, [-1.5], [1.5]) - 0.5087537579583935) <= 1e-12
    assert tmvt_density([-2], [0], [[1]], 1, [-1.5], [1.5]) == 0.0


def test_truncation_raises_density_inside_box():
    inside = tmvn_density([0, 0], [0, 0], S2, *BOX)
    assert inside > mvn_density([0, 0], [0, 0], S2)
    assert tmvt_density([0, 0], [0, 0], S2, 1, *BOX) > mvt_density([0, 0], [0, 0], S2, 1)


def test_whole_space_truncation_is_vacuous():
    lo, hi = [-np.inf] * 2, [np.inf] * 2
    assert tmvt_density([0.3, -1], [0, 0], S2, 2, lo, hi) == mvt_density([0.3, -1], [0, 0], S2, 2)


def test_boundary_points_are_inside():
    assert tmvn_density([1.5, -1.5], [0, 0], S2, *BOX) > 0


def test_log_linear_consistency():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-1.4, 1.4, size=(50, 2))
    for f, args in [(mvn_density, ()), (mvt_density, (2.5,))]:
        lin = f(pts, [0.1, -0.2], S2, *args)
        log = f(pts, [0.1, -0.2], S2, *args, log_scale=True)
        assert np.allclose(np.exp(log), lin, rtol=1e-12, atol=0)
    lin = tmvn_density(pts, [0, 0], S2, *BOX)
    log = tmvn_density(pts, [0, 0], S2, *BOX, log_scale=True)
    assert np.allclose(np.exp(log), lin, rtol=1e-12, atol=0)


def test_large_df_approaches_normal():
    g = np.linspace(-3, 3, 25)
    pts = np.array([(a, b) for a in g for b in g])
    nu, k = 1e6, 2
    n = mvn_density(pts, [0, 0], S2)
    t = mvt_density(pts, [0, 0], S2, nu)
    q = np.einsum("ij,jk,ik->i", pts, np.linalg.inv(S2), pts)
    # log(t/n) = (Q^2 - 2kQ + k(k-2)) / (4 nu) + O(nu^-2)
    first_order = (q ** 2 - 2 * k * q + k * (k - 2)) / (4 * nu)
    assert np.allclose(np.log(t / n), first_order, rtol=0, atol=1e-8)
    inner = np.all(np.abs(pts) <= 2, axis=1)
    assert np.max(np.abs(t - n)[inner] / n[inner]) <= 1e-4


def test_large_df_no_overflow():
    assert np.isfinite(mvt_density([0, 0], [0, 0], S2, 1e300))


def _trapezoid_2d(f, lo, hi, n):
    g1 = np.linspace(lo[0], hi[0], n)
    g2 = np.linspace(lo[1], hi[1], n)
    x1, x2 = np.meshgrid(g1, g2, indexing="ij")
    vals = f(np.column_stack([x1.ravel(), x2.ravel()])).reshape(n, n)
    return np.trapezoid(np.trapezoid(vals, g2, axis=1), g1)


def test_normalisation_by_trapezoid():
    assert abs(_trapezoid_2d(lambda p: mvn_density(p, [0, 0], S2), (-8, -8), (8, 8), 801) - 1) <= 1e-4
    tot = _trapezoid_2d(lambda p: tmvn_density(p, [0, 0], S2, *BOX), (-1.5, -1.5), (1.5, 1.5), 601)
    assert abs(tot - 1) <= 1e-4


def test_normalising_constant_cached():
    normalizer_cache.clear()
    tmvn_density([0, 0], [0, 0], S2, *BOX, seed=4)
    assert len(normalizer_cache._data) == 1
    tmvn_density([[0.1, 0], [0.2, 0.3]], [0, 0], S2, *BOX, seed=4)
    assert len(normalizer_cache._data) == 1
    tmvn_density([0, 0], [0, 0], S2, *BOX, seed=5)
    assert len(normalizer_cache._data) == 2


def test_density_uses_box_probability():
    est = mvn_probability(*BOX, [0, 0], S2, QmcConfig(), 0)
    expected = mvn_density([0.2, 0.1], [0, 0], S2) / est.value
    assert math.isclose(tmvn_density([0.2, 0.1], [0, 0], S2, *BOX), expected, rel_tol=1e-13)


def test_degenerate_truncation():
    with pytest.raises(DegenerateTruncation):
        tmvn_density([40.5], [0], [[1]], [40], [41])
    with pytest.raises(DegenerateTruncation):
        tmvn_density([40.5, 40.5], [0, 0], equicorrelated(2), [40, 40], [41, 41])
