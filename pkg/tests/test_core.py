import numpy as np
import pytest

from mvdist import (
    BisectionConfig,
    DimensionMismatch,
    InvalidBounds,
    InvalidDf,
    NotPositiveDefinite,
    NotSymmetric,
    QmcConfig,
    Tail,
    ValidationError,
    validate_spec,
)


def test_valid_bivariate_spec():
    spec = validate_spec([0, 0], [[1, 0.5], [0.5, 1]])
    assert spec.k == 2
    assert spec.nu is None and not spec.truncated


def test_degenerate_truncation_interval_rejected():
    with pytest.raises(InvalidBounds):
        validate_spec([0], [[1]], lower_trunc=[0], upper_trunc=[0])


def test_indefinite_matrix_rejected():
    # eigenvalues of [[1, 2], [2, 1]] are 3 and -1
    assert np.allclose(sorted(np.roots([1, -2, 1 - 4])), [-1, 3])
    with pytest.raises(NotPositiveDefinite):
        validate_spec([0, 0], [[1, 2], [2, 1]])


def test_singular_matrix_rejected():
    with pytest.raises(NotPositiveDefinite):
        validate_spec([0, 0], [[1, 1], [1, 1]])


@pytest.mark.parametrize("delta, sigma, kwargs, exc", [
    ([0, 0], [[1, 0.5], [0.4, 1]], {}, NotSymmetric),
    ([0, 0, 0], [[1, 0], [0, 1]], {}, DimensionMismatch),
    ([0, np.nan], [[1, 0], [0, 1]], {}, ValidationError),
    ([0, 0], [[1, np.nan], [np.nan, 1]], {}, ValidationError),
    ([0], [[1]], {"nu": 0}, InvalidDf),
    ([0], [[1]], {"nu": -2.5}, InvalidDf),
    ([0], [[1]], {"nu": np.nan}, InvalidDf),
    ([0, 0], np.eye(2), {"lower_trunc": [0], "upper_trunc": [1]}, DimensionMismatch),
    ([0, 0], np.eye(2), {"lower_trunc": [0, 2], "upper_trunc": [1, 1]}, InvalidBounds),
    ([0], [[1]], {"lower_trunc": [0]}, InvalidBounds),
    ([0], [[1]], {"lower_trunc": [np.nan], "upper_trunc": [1]}, ValidationError),
])
def test_validation_errors(delta, sigma, kwargs, exc):
    with pytest.raises(exc):
        validate_spec(delta, sigma, **kwargs)


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        validate_spec([0, 0], [[1, 2], [2, 1]])


def test_spec_is_immutable():
    spec = validate_spec([0, 1], np.eye(2), lower_trunc=[-1, -1], upper_trunc=[1, np.inf])
    with pytest.raises(ValueError):
        spec.delta[0] = 3.0
    with pytest.raises(AttributeError):
        spec.nu = 2.0


def test_infinite_truncation_limits_allowed():
    spec = validate_spec([0], [[1]], lower_trunc=[-np.inf], upper_trunc=[np.inf])
    assert spec.truncated


def test_non_integer_df_allowed():
    assert validate_spec([0], [[1]], nu=2.5).nu == 2.5


def test_configs_defaults_and_checks():
    q = QmcConfig()
    assert (q.shifts, q.samples, q.alpha) == (12, 1000, 3.0)
    b = BisectionConfig()
    assert (b.itermax, b.tolerance, b.tail) == (1_000_000, 1e-6, Tail.LOWER)
    assert BisectionConfig(tail="both").tail is Tail.BOTH
    for bad in [dict(shifts=0), dict(samples=0), dict(alpha=0.0), dict(shifts=1.5)]:
        with pytest.raises(ValidationError):
            QmcConfig(**bad)
    for bad in [dict(itermax=0), dict(tolerance=0.0), dict(tail="middle")]:
        with pytest.raises(ValidationError):
            BisectionConfig(**bad)
