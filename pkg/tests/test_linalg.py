import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvdist import Method, NotPositiveDefinite, UnknownMethod, cholesky_lower, matrix_sqrt


def test_cholesky_identity():
    assert np.array_equal(cholesky_lower(np.eye(2)), np.eye(2))


def test_cholesky_correlated():
    L = cholesky_lower([[1, 0.5], [0.5, 1]])
    expected = np.array([[1, 0], [0.5, np.sqrt(0.75)]])
    assert np.allclose(L, expected, atol=1e-15)
    assert np.allclose(L @ L.T, [[1, 0.5], [0.5, 1]], atol=1e-15)


def test_cholesky_diagonal():
    assert np.allclose(cholesky_lower([[4, 0], [0, 9]]), [[2, 0], [0, 3]])


def test_cholesky_rejects_tiny_pivot():
    with pytest.raises(NotPositiveDefinite):
        cholesky_lower([[1, 1 - 1e-13], [1 - 1e-13, 1]])


@pytest.mark.parametrize("method", ["cholesky", "eigen", "svd"])
def test_sqrt_reconstructs(method):
    s = np.array([[1, 0.5], [0.5, 1]])
    R = matrix_sqrt(s, method).entries
    assert np.max(np.abs(R @ R.T - s)) <= 1e-10
    assert np.allclose(matrix_sqrt(np.eye(3), method).entries @ matrix_sqrt(np.eye(3), method).entries.T,
                       np.eye(3))


def test_cholesky_factor_is_lower_triangular():
    f = matrix_sqrt([[2, 0.3, 0.1], [0.3, 1, 0.2], [0.1, 0.2, 3]], Method.CHOLESKY)
    assert np.allclose(np.triu(f.entries, 1), 0)
    assert (np.diag(f.entries) > 0).all()


def test_eigen_columns_descending():
    R = matrix_sqrt([[3, 1], [1, 2]], "eigen").entries
    norms = np.linalg.norm(R, axis=0)
    assert norms[0] >= norms[1]


def test_eigen_is_deterministic_under_ties():
    a = matrix_sqrt(np.eye(4) * 2, "eigen").entries
    b = matrix_sqrt(np.eye(4) * 2, "eigen").entries
    assert np.array_equal(a, b)


def test_unknown_method():
    with pytest.raises(UnknownMethod):
        matrix_sqrt(np.eye(2), "qr")


def test_eigen_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        matrix_sqrt([[1, 2], [2, 1]], "eigen")


@settings(max_examples=60, deadline=None)
@given(k=st.integers(1, 8), seed=st.integers(0, 2**32 - 1),
       method=st.sampled_from(list(Method)))
def test_reconstruction_property(k, seed, method):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(k, k))
    s = a @ a.T + 0.1 * np.eye(k)
    R = matrix_sqrt(s, method).entries
    assert np.max(np.abs(R @ R.T - s)) <= 1e-10 * np.max(np.abs(s))
