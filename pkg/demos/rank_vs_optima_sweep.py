"""A small rank-versus-optima sweep and its summary statistics.

Run with ``python3 demos/rank_vs_optima_sweep.py``. The same sweep is
available from the command line as ``nklandscapes sweep``.
"""

from nklandscapes.experiments import (SweepSpec, adjacent_vs_maximal, cell_correlations,
                                      pooled_loglog_correlation, run_sweep)

spec = SweepSpec(n_values=(25,), k_values=(1, 2, 3, 4, 5), replicates_per_cell=10, seed=7)
rows = run_sweep(spec)
print(f"{len(rows)} designs")

for family in ("classic", "generalized"):
    corr = cell_correlations(rows, family)
    print(family, "within-cell corr(rank, log optima):",
          {k: round(v, 2) for (_, k), v in corr.items()})
    print(family, "pooled log-log corr:", round(pooled_loglog_correlation(rows, family, 25), 3))

for (n, k), (adj, mx) in adjacent_vs_maximal(rows).items():
    print(f"K={k}: adjacent rank {adj['rank']} optima {adj['expected']:.4g}"
          f" | maximal rank {mx['rank']} optima {mx['expected']:.4g}")
