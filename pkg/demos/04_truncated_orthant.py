"""
Orthant probability under lower truncation
==========================================

Truncate an equicorrelated trivariate normal to ``[t, inf)^3`` and track the
probability of the positive orthant as ``t`` moves. Far below zero the
truncation barely matters and the value is the untruncated 1/4. From
``t = 0`` on, all remaining mass lies in the orthant.
"""

import numpy as np

from mvdist import mvn_probability, truncation_curve

sigma = np.full((3, 3), 0.5) + 0.5 * np.eye(3)
mean = np.zeros(3)

untruncated = mvn_probability(np.zeros(3), np.full(3, np.inf), mean, sigma, seed=1)
print(f"untruncated orthant probability {untruncated.value:.6f} +- {untruncated.error:.1e}")

t = np.round(np.arange(-8.0, 2.0 + 1e-9, 0.5), 10)
rows = truncation_curve(mean, sigma, t, seed=1)
for ti, p, err in rows:
    print(f"t = {ti:5.1f}   P = {p:.6f}   error {err:.1e}")

assert np.all(np.diff(rows[:, 1]) >= 0)
