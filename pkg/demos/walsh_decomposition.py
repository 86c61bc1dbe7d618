"""Lookup-table weights versus interaction coefficients on a three-locus landscape.

Run with ``python3 demos/walsh_decomposition.py``.
"""

import numpy as np

from nklandscapes import (coefficient_moments, extract_coefficients, full_fitness_vector,
                          model_matrix, random_landscape, rank, term_set, walsh_matrix)
from nklandscapes.reference import EXAMPLE_DESIGN

design = EXAMPLE_DESIGN
print("interaction sets:", design.sets)

# one row per genotype 000..111, one column per table entry
F = model_matrix(design)
print("model matrix F:\n", F)

ts = term_set(design)
print("terms:", [list(t) for t in ts])
print("rank:", rank(design))

X = walsh_matrix(design)
print("coded design matrix:\n", X)

ls = random_landscape(design, seed=1)
p = full_fitness_vector(ls)
beta = extract_coefficients(design, ls.weights.flat)
print("fitness:", np.round(p, 3))
print("coefficients:", np.round(beta, 3))
print("max reconstruction error:", np.abs(X @ beta - p).max())

# exact variances as fractions of sigma^2
for t, (mean, var) in coefficient_moments(design, 0, 1).items():
    print(f"  beta_{list(t)}: mean {mean}, var {var}")
