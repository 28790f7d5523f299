"""
Densities with and without truncation
=====================================

Evaluate the four bivariate densities on a grid and, when matplotlib is
available, draw them as contour plots. Truncating to a box raises the
density inside the box because the mass outside it is redistributed.
"""

import numpy as np

from mvdist import density_grid

delta = [0.0, 0.0]
sigma = [[1.0, 0.5], [0.5, 1.0]]
box = dict(lower_trunc=[-1.5, -1.5], upper_trunc=[1.5, 1.5])

grids = {
    "normal": density_grid("mvnormalden", delta, sigma),
    "t, 1 df": density_grid("mvtden", delta, sigma, nu=1),
    "truncated normal": density_grid("tmvnormalden", delta, sigma, **box),
    "truncated t, 1 df": density_grid("tmvtden", delta, sigma, nu=1, **box),
}

# the grid is 61 x 61 with x1 varying slowest
n = 61
for name, tab in grids.items():
    peak = tab[(tab[:, 0] == 0) & (tab[:, 1] == 0), 2][0]
    print(f"{name:>18}: density at the origin {peak:.5f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, axes = plt.subplots(2, 2, figsize=(8, 8), sharex=True, sharey=True)
    for ax, (name, tab) in zip(axes.ravel(), grids.items()):
        x1 = tab[:, 0].reshape(n, n)
        x2 = tab[:, 1].reshape(n, n)
        ax.contour(x1, x2, tab[:, 2].reshape(n, n), levels=12)
        ax.set_title(name)
    fig.tight_layout()
    fig.savefig("density_contours.png", dpi=100)
    print("wrote density_contours.png")
