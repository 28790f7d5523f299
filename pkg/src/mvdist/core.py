"""
Shared domain types, exceptions and input validation.

Extended reals are plain floats: ``-inf`` and ``inf`` stand for the
infinite limits, NaN is always rejected.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

PD_TOLERANCE = 1e-10
SYMMETRY_RTOL = 1e-12


class MvdistError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MvdistError, ValueError):
    """Inputs violate a documented invariant."""


class DimensionMismatch(ValidationError):
    pass


class NotSymmetric(ValidationError):
    pass


class NotPositiveDefinite(ValidationError):
    pass


class InvalidBounds(ValidationError):
    pass


class InvalidDf(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class UnknownMethod(ValidationError):
    pass


class UnsupportedDimension(ValidationError):
    pass


class NumericalError(MvdistError):
    """A computation could not produce a trustworthy answer."""


class DegenerateTruncation(NumericalError):
    pass


class AcceptanceTooLow(NumericalError):
    pass


class Method(str, enum.Enum):
    """Matrix square-root used by the samplers."""

    CHOLESKY = "cholesky"
    EIGEN = "eigen"
    SVD = "svd"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise UnknownMethod(
                f"unknown factorization method {value!r}; "
                f"expected one of {[m.value for m in cls]}") from None


class Tail(str, enum.Enum):
    LOWER = "lower"
    UPPER = "upper"
    BOTH = "both"

    @classmethod
    def parse(cls, value) -> "Tail":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(
                f"unknown tail {value!r}; expected lower, upper or both") from None


@dataclass(frozen=True)
class QmcConfig:
    """Randomized lattice rule settings.

    ``alpha`` multiplies the standard error of the per-shift means to give
    the reported error bound.
    """

    shifts: int = 12
    samples: int = 1000
    alpha: float = 3.0

    def __post_init__(self):
        if int(self.shifts) != self.shifts or self.shifts < 1:
            raise ValidationError(f"shifts must be a positive integer, got {self.shifts!r}")
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValidationError(f"samples must be a positive integer, got {self.samples!r}")
        if not np.isfinite(self.alpha) or self.alpha <= 0:
            raise ValidationError(f"alpha must be positive, got {self.alpha!r}")


@dataclass(frozen=True)
class BisectionConfig:
    itermax: int = 1_000_000
    tolerance: float = 1e-6
    tail: Tail = Tail.LOWER

    def __post_init__(self):
        if int(self.itermax) != self.itermax or self.itermax < 1:
            raise ValidationError(f"itermax must be a positive integer, got {self.itermax!r}")
        if not np.isfinite(self.tolerance) or self.tolerance <= 0:
            raise ValidationError(f"tolerance must be positive, got {self.tolerance!r}")
        object.__setattr__(self, "tail", Tail.parse(self.tail))


@dataclass(frozen=True)
class ProbabilityEstimate:
    value: float
    error: float

    def __iter__(self):
        yield self.value
        yield self.error


@dataclass(frozen=True)
class QuantileResult:
    """Outcome of an equicoordinate quantile search.

    ``flag`` is 0 on convergence, 1 when the iteration budget (or the
    floating point resolution of the bracket) ran out before the objective
    met the tolerance, 2 when no bracket containing a sign change was found.
    """

    quantile: float
    error: float
    flag: int
    fquantile: float
    iterations: int


@dataclass(frozen=True, eq=False)
class DistributionSpec:
    """Validated parameters of one of the four distribution families."""

    delta: np.ndarray
    sigma: np.ndarray
    nu: Optional[float] = None
    lower_trunc: Optional[np.ndarray] = None
    upper_trunc: Optional[np.ndarray] = None
    chol: np.ndarray = field(default=None, repr=False)

    @property
    def k(self) -> int:
        return self.delta.shape[0]

    @property
    def truncated(self) -> bool:
        return self.lower_trunc is not None


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def as_vector(values, name: str, *, allow_inf: bool = False) -> np.ndarray:
    try:
        v = np.atleast_1d(np.asarray(values, dtype=float))
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a vector of reals") from None
    if v.ndim != 1 or v.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty vector, got shape {v.shape}")
    if np.isnan(v).any():
        raise ValidationError(f"{name} contains NaN")
    if not allow_inf and not np.isfinite(v).all():
        raise ValidationError(f"{name} must be finite")
    return v


def check_sigma(sigma, k: Optional[int] = None) -> np.ndarray:
    """Return ``sigma`` as a float array after the symmetry and shape checks."""
    try:
        s = np.atleast_2d(np.asarray(sigma, dtype=float))
    except (TypeError, ValueError):
        raise ValidationError("sigma must be a real matrix") from None
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch(f"sigma must be square, got shape {s.shape}")
    if k is not None and s.shape[0] != k:
        raise DimensionMismatch(f"sigma is {s.shape[0]}x{s.shape[0]} but the location has length {k}")
    if not np.isfinite(s).all():
        raise ValidationError("sigma must contain finite reals only")
    scale = np.maximum(np.abs(s), np.abs(s.T))
    if (np.abs(s - s.T) > SYMMETRY_RTOL * scale).any():
        raise NotSymmetric("sigma is not symmetric")
    return s


def check_bounds(lower, upper, k: int, names=("lower", "upper"), cls=InvalidBounds):
    lo = as_vector(lower, names[0], allow_inf=True)
    hi = as_vector(upper, names[1], allow_inf=True)
    if lo.size != k or hi.size != k:
        raise DimensionMismatch(
            f"{names[0]}/{names[1]} have lengths {lo.size}/{hi.size}, expected {k}")
    if not (lo < hi).all():
        bad = int(np.argmax(~(lo < hi)))
        raise cls(f"{names[0]}[{bad}] = {lo[bad]} must be strictly below {names[1]}[{bad}] = {hi[bad]}")
    return lo, hi


def check_df(nu) -> float:
    try:
        nu = float(nu)
    except (TypeError, ValueError):
        raise InvalidDf(f"degrees of freedom must be a positive real, got {nu!r}") from None
    if not nu > 0 or np.isnan(nu):
        raise InvalidDf(f"degrees of freedom must be positive, got {nu}")
    return nu


def validate_spec(delta, sigma, nu=None, lower_trunc=None, upper_trunc=None) -> DistributionSpec:
    """Validate distribution parameters and return an immutable spec.

    Raises a subclass of :class:`ValidationError` on the first violated
    invariant. The Cholesky factor computed for the positive-definiteness
    check is kept on the result.
    """
    from .linalg import cholesky_lower

    d = as_vector(delta, "delta")
    s = check_sigma(sigma, d.size)
    chol = cholesky_lower(s)
    if nu is not None:
        nu = check_df(nu)
    lo = hi = None
    if (lower_trunc is None) != (upper_trunc is None):
        raise InvalidBounds("both truncation limits must be given together")
    if lower_trunc is not None:
        lo, hi = check_bounds(lower_trunc, upper_trunc, d.size,
                              names=("lower truncation", "upper truncation"))
        lo, hi = _frozen(lo), _frozen(hi)
    return DistributionSpec(_frozen(d), _frozen(s), nu, lo, hi, _frozen(chol))
