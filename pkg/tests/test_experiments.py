import math

import numpy as np
import pytest

from nklandscapes.errors import ParameterError
from nklandscapes.experiments import (SWEEP_FIELDS, SweepSpec, adjacent_vs_maximal,
                                      cell_correlations, plan_cell, pooled_loglog_correlation,
                                      read_sweep_csv, row_seed, rows_to_csv, run_sweep, verify)


def test_plan_cell_fills_classic_slots():
    spec = SweepSpec(replicates_per_cell=5)
    jobs = plan_cell(spec, 20, 2)
    classic = [j for j in jobs if j[0] == "classic"]
    assert classic[:2] == [("classic", "maximal", 0), ("classic", "adjacent", 0)]
    assert len(classic) == 5
    assert sum(j[0] == "generalized" for j in jobs) == 5


def test_plan_cell_without_maximal():
    spec = SweepSpec(replicates_per_cell=4)
    jobs = plan_cell(spec, 50, 6)
    assert ("classic", "maximal", 0) not in jobs
    assert sum(j[0] == "classic" for j in jobs) == 4


def test_spec_validation():
    with pytest.raises(ParameterError):
        SweepSpec(n_values=())
    with pytest.raises(ParameterError):
        SweepSpec(replicates_per_cell=0)
    with pytest.raises(ParameterError):
        SweepSpec(design_kinds=("maximal", "spiral"))


def test_row_seed_distinct_and_stable():
    seeds = {row_seed(0, 25, k, "random_classic", r) for k in range(1, 8) for r in range(20)}
    assert len(seeds) == 140
    assert row_seed(1, 25, 3, "adjacent", 0) == row_seed(1, 25, 3, "adjacent", 0)


def test_csv_round_trip():
    rows = run_sweep(SweepSpec(n_values=(9,), k_values=(2,), replicates_per_cell=3, seed=1))
    text = rows_to_csv(rows, banner="test")
    assert text.splitlines()[0] == "# test"
    assert text.splitlines()[1] == ",".join(SWEEP_FIELDS)
    again = read_sweep_csv(text)
    assert [r["rank"] for r in again] == [r["rank"] for r in rows]
    assert [r["expected"] for r in again] == [r["expected"] for r in rows]


def test_sweep_skips_impossible_k():
    rows = run_sweep(SweepSpec(n_values=(4,), k_values=(3, 4), replicates_per_cell=2,
                               design_kinds=("adjacent",)))
    assert {r["k"] for r in rows} == {3}


def fake_rows():
    rows = []
    for k in (2, 3):
        for r, (rank, expected) in enumerate([(10, 100.0), (20, 50.0), (30, 20.0)]):
            rows.append({"family": "classic", "design_kind": "random_classic", "n": 20,
                         "k": k, "replicate": r, "rank": rank * k, "expected": expected * k,
                         "expected_error": 0.1})
    return rows


def test_cell_correlations():
    corr = cell_correlations(fake_rows(), "classic")
    assert set(corr) == {(20, 2), (20, 3)}
    x = [10, 20, 30]
    y = [math.log(v) for v in (100, 50, 20)]
    assert corr[(20, 2)] == pytest.approx(np.corrcoef(x, y)[0, 1])
    assert math.isnan(pooled_loglog_correlation(fake_rows(), "generalized", 20))


def test_adjacent_vs_maximal_pairs_cells():
    rows = [{"design_kind": kind, "n": 20, "k": k, "rank": 1} for k in (2, 3)
            for kind in ("adjacent", "maximal") if not (k == 3 and kind == "maximal")]
    assert list(adjacent_vs_maximal(rows)) == [(20, 2)]


def test_verify_full_passes():
    results = verify("full", seed=0)
    assert len(results) == 13
    assert all(r.passed for r in results), [r for r in results if not r.passed]


def test_verify_rejects_level():
    with pytest.raises(ParameterError):
        verify("thorough")
