"""Multivariate normal and t distributions, with and without box truncation.

Densities, rectangle probabilities (randomized lattice quasi-Monte Carlo),
equicoordinate quantiles and pseudo-random draws.
"""

from .core import (
    AcceptanceTooLow,
    BisectionConfig,
    DegenerateTruncation,
    DimensionMismatch,
    DistributionSpec,
    DomainError,
    InvalidBounds,
    InvalidDf,
    Method,
    MvdistError,
    NotPositiveDefinite,
    NotSymmetric,
    NumericalError,
    ProbabilityEstimate,
    QmcConfig,
    QuantileResult,
    Tail,
    UnknownMethod,
    UnsupportedDimension,
    ValidationError,
    validate_spec,
)
from .densities import mvn_density, mvt_density, tmvn_density, tmvt_density
from .grids import density_grid, truncation_curve
from .linalg import MatrixFactor, cholesky_lower, matrix_sqrt
from .qmc import (
    mvn_probability,
    mvt_probability,
    reorder_variables,
    tmvn_probability,
    tmvt_probability,
)
from .quantiles import mvn_quantile, mvt_quantile, tmvn_quantile, tmvt_quantile
from .sampling import SampleMatrix, sample_mvn, sample_mvt, sample_tmvn, sample_tmvt
from .special import chi_quantile, log_gamma, std_normal_cdf, std_normal_inv_cdf

__version__ = "0.1.0"
