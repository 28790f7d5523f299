"""
Dunnett versus Bonferroni for three correlated tests
====================================================

Three one-sided z tests share a common control, so their statistics are
equicorrelated with rho = 0.5. The Dunnett critical value comes from an
equicoordinate quantile of the joint distribution. The Bonferroni
threshold ignores the correlation, and its true familywise error rate can
be computed from the joint CDF.
"""

import numpy as np
from scipy.stats import norm

from mvdist import mvn_probability, mvn_quantile

alpha = 0.05
mean = np.zeros(3)
sigma = np.full((3, 3), 0.5) + 0.5 * np.eye(3)

dunnett = mvn_quantile(1 - alpha, mean, sigma, seed=1)
print(f"Dunnett critical value {dunnett.quantile:.4f} "
      f"(error {dunnett.error:.1e}, flag {dunnett.flag}, {dunnett.iterations} iterations)")

fwer = 1 - mvn_probability(np.full(3, -np.inf), np.full(3, dunnett.quantile), mean, sigma, seed=1).value
print(f"familywise error rate with Dunnett:    {fwer:.4f}")

z = norm.ppf(1 - alpha / 3)
fwer = 1 - mvn_probability(np.full(3, -np.inf), np.full(3, z), mean, sigma, seed=1).value
print(f"familywise error rate with Bonferroni: {fwer:.4f} (threshold {z:.4f})")
