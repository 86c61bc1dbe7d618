"""Small worked examples with hand-checkable matrices, used by tests and ``verify``."""

import numpy as np

from .landscape import InteractionDesign

# N=3, K=1 with V_1={1,2}, V_2={2,3}, V_3={1,3}
EXAMPLE_DESIGN = InteractionDesign(3, [[1, 2], [2, 3], [1, 3]])

EXAMPLE_MODEL_MATRIX = np.array([
    [1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0],
    [1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0],
    [0, 1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0],
    [0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1],
    [0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0],
    [0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1],
], dtype=np.int8)

# columns in the order the sets are listed, not canonical order
EXAMPLE_WALSH_TERMS = [(), (1,), (2,), (3,), (1, 2), (2, 3), (1, 3)]
EXAMPLE_WALSH_MATRIX = np.array([
    [1, -1, -1, -1, 1, 1, 1],
    [1, -1, -1, 1, 1, -1, -1],
    [1, -1, 1, -1, -1, -1, 1],
    [1, -1, 1, 1, -1, 1, -1],
    [1, 1, -1, -1, -1, 1, -1],
    [1, 1, -1, 1, -1, -1, 1],
    [1, 1, 1, -1, 1, -1, -1],
    [1, 1, 1, 1, 1, 1, 1],
], dtype=np.int8)

# two N=5 designs with the same term set but different coefficient variances
DESIGN_A = InteractionDesign(5, [[1, 2, 3, 4], [2, 3], [1, 3], [1, 3, 4], [2, 5]])
DESIGN_B = InteractionDesign(5, [[1, 4], [1, 2, 3, 4], [3], [4], [2, 5]])

MAXIMAL_7_2 = InteractionDesign(7, [[1, 2, 4], [2, 3, 5], [3, 4, 6], [4, 5, 7],
                                    [5, 6, 1], [6, 7, 2], [7, 1, 3]])
