"""Maximal, adjacent and random designs side by side.

Run with ``python3 demos/design_constructions.py``.
"""

from nklandscapes import (adjacent_design, is_packing, max_rank_bound, maximal_design,
                          random_classic_design, random_generalized_design, random_latin_square,
                          rank)
from nklandscapes.designs import DIFFERENCE_SETS, differences, maximal_rank_known

for k, (elements, n0) in DIFFERENCE_SETS.items():
    print(f"K={k}: {elements} usable for N >= {n0}")

print("differences of (0, 1, 3) mod 7:", sorted(differences((0, 1, 3), 7)))

n, k = 7, 2
for name, d in [("maximal", maximal_design(n, k)), ("adjacent", adjacent_design(n, k))]:
    print(f"{name:>9}: rank {rank(d)} of {max_rank_bound(n, k)}, packing={is_packing(d)}")
    print("           sets", d.sets)

sq = random_latin_square(6, seed=0)
print("random Latin square of order 6:\n", sq.grid)

ranks = sorted(rank(random_classic_design(n, k, seed=s)) for s in range(50))
print("random classic ranks at N=7, K=2 over 50 seeds:", ranks)

d = random_generalized_design(12, 3, seed=0)
print("generalized design is classic:", d.is_classic(), "rank", rank(d))

for args in [(7, 2), (22, 4), (6, 2)]:
    print(f"maximal design for N={args[0]}, K={args[1]}:", maximal_rank_known(*args).value)
