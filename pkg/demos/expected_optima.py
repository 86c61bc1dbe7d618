"""Expected number of local optima from the difference covariance, checked by brute force.

Run with ``python3 demos/expected_optima.py``.
"""

import numpy as np

from nklandscapes import (adjacent_design, expected_local_optima, maximal_design,
                          monte_carlo_expected_optima, random_classic_design, sigma_from_design)

np.set_printoptions(precision=3, suppress=True)

d = adjacent_design(6, 2)
print("difference covariance for the adjacent N=6, K=2 design:\n", sigma_from_design(d))

for name, d in [("adjacent", adjacent_design(10, 2)), ("maximal", maximal_design(10, 2)),
                ("random", random_classic_design(10, 2, seed=3))]:
    r = expected_local_optima(d, rel_err=1e-4)
    mean, se = monte_carlo_expected_optima(d, replicates=1000, seed=0)
    print(f"{name:>8}: rank {r.rank:3d}  expected {r.expected:7.3f} +- {r.expected_error:.3f}"
          f"  brute force {mean:7.3f} +- {se:.3f}")

# the two limits
print("K=0, N=30:", expected_local_optima(adjacent_design(30, 0)).expected)
r = expected_local_optima(adjacent_design(12, 11), rel_err=1e-4)
print(f"K=N-1, N=12: {r.expected:.3f} vs 2^12/13 = {2 ** 12 / 13:.3f}")
