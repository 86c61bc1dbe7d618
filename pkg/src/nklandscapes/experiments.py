"""Design sweeps (rank vs expected local optima) and the self-verification suite."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import designs, mvn, optima, walsh
from .errors import DesignError, ParameterError
from .landscape import InteractionDesign, model_matrix
from .reference import (DESIGN_A, DESIGN_B, EXAMPLE_DESIGN, EXAMPLE_MODEL_MATRIX,
                        EXAMPLE_WALSH_MATRIX, EXAMPLE_WALSH_TERMS)

log = logging.getLogger(__name__)

CLASSIC_KINDS = ("maximal", "adjacent", "random_classic")
SWEEP_FIELDS = ("family", "design_kind", "n", "k", "replicate", "rank", "expected",
                "expected_error", "seed", "design")


@dataclass
class SweepSpec:
    n_values: tuple = (25, 50, 100)
    k_values: tuple = tuple(range(1, 8))
    replicates_per_cell: int = 20
    design_kinds: tuple = designs.DESIGN_KINDS
    sigma2: float = 1.0
    seed: int = 0
    rel_err: float = 1e-2
    max_samples: int = 1 << 16

    def __post_init__(self):
        if not self.n_values or not self.k_values:
            raise ParameterError("n_values and k_values must be nonempty")
        if self.replicates_per_cell < 1:
            raise ParameterError("replicates_per_cell must be >= 1")
        bad = set(self.design_kinds) - set(designs.DESIGN_KINDS)
        if bad:
            raise ParameterError(f"unknown design kinds {sorted(bad)}")


def row_seed(base: int, n: int, k: int, kind: str, replicate: int) -> int:
    kind_id = designs.DESIGN_KINDS.index(kind)
    return int(np.random.SeedSequence([base, n, k, kind_id, replicate]).generate_state(1)[0])


def plan_cell(spec: SweepSpec, n: int, k: int) -> list:
    """``(family, kind, replicate)`` jobs for one ``(n, k)`` cell."""
    jobs = []
    kinds = set(spec.design_kinds)
    if kinds & set(CLASSIC_KINDS):
        slots = spec.replicates_per_cell
        if "maximal" in kinds:
            try:
                designs.maximal_difference_set(n, k)
                jobs.append(("classic", "maximal", 0))
                slots -= 1
            except DesignError as exc:
                log.info("cell n=%d k=%d: no maximal design (%s)", n, k, exc)
        if "adjacent" in kinds and slots > 0:
            jobs.append(("classic", "adjacent", 0))
            slots -= 1
        if "random_classic" in kinds:
            jobs += [("classic", "random_classic", r) for r in range(max(slots, 0))]
    if "random_generalized" in kinds:
        jobs += [("generalized", "random_generalized", r)
                 for r in range(spec.replicates_per_cell)]
    return jobs


def _run_job(args):
    spec, n, k, family, kind, replicate = args
    seed = row_seed(spec.seed, n, k, kind, replicate)
    design = designs.make_design(kind, n, k, seed)
    rep = optima.expected_local_optima(design, spec.sigma2, rel_err=spec.rel_err,
                                       max_samples=spec.max_samples, seed=seed,
                                       design_type=kind)
    return {"family": family, "design_kind": kind, "n": n, "k": k, "replicate": replicate,
            "rank": rep.rank, "expected": rep.expected, "expected_error": rep.expected_error,
            "seed": seed, "design": json.dumps(design.to_dict(), separators=(",", ":"))}


def _sort_key(row):
    return (row["family"], row["n"], row["k"], designs.DESIGN_KINDS.index(row["design_kind"]),
            row["replicate"])


def run_sweep(spec: SweepSpec, workers: int = 1) -> list:
    """One row per generated design; rows come back in a fixed order."""
    jobs = [(spec, n, k, fam, kind, r)
            for n in spec.n_values for k in spec.k_values if k <= n - 1
            for fam, kind, r in plan_cell(spec, n, k)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_run_job, jobs, chunksize=4))
    else:
        rows = [_run_job(j) for j in jobs]
    return sorted(rows, key=_sort_key)


def rows_to_csv(rows, fields=SWEEP_FIELDS, banner: str | None = None) -> str:
    buf = io.StringIO()
    if banner:
        buf.write(f"# {banner}\n")
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def read_sweep_csv(text: str) -> list:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = []
    for r in csv.DictReader(lines):
        for key in ("n", "k", "replicate", "rank", "seed"):
            r[key] = int(r[key])
        for key in ("expected", "expected_error"):
            r[key] = float(r[key])
        rows.append(r)
    return rows


def _pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 3 or np.std(x) == 0 or np.std(y) == 0:
        return float("nan")
    return float(np.corrcoef(x, y)[0, 1])


def cell_correlations(rows, family: str) -> dict:
    """Per ``(n, k)``: correlation of rank with log expected optima."""
    cells = {}
    for r in rows:
        if r["family"] == family:
            cells.setdefault((r["n"], r["k"]), []).append(r)
    return {key: _pearson([r["rank"] for r in rs], [math.log(r["expected"]) for r in rs])
            for key, rs in sorted(cells.items())}


def pooled_loglog_correlation(rows, family: str, n: int) -> float:
    rs = [r for r in rows if r["family"] == family and r["n"] == n]
    return _pearson([math.log(r["rank"]) for r in rs], [math.log(r["expected"]) for r in rs])


def adjacent_vs_maximal(rows) -> dict:
    """Per cell with both designs: ``(adjacent_row, maximal_row)``."""
    out = {}
    for r in rows:
        if r["design_kind"] in ("adjacent", "maximal"):
            out.setdefault((r["n"], r["k"]), {})[r["design_kind"]] = r
    return {key: (v["adjacent"], v["maximal"]) for key, v in sorted(out.items())
            if len(v) == 2}


# -- verification suite -----------------------------------------------------------

@dataclass
class CheckResult:
    module: str
    name: str
    passed: bool
    detail: str = ""


@dataclass
class _Suite:
    results: list = field(default_factory=list)

    def run(self, module, name, fn):
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        self.results.append(CheckResult(module, name, bool(ok), detail))


def _shared_counts(design: InteractionDesign) -> np.ndarray:
    n = design.n
    out = np.zeros((n, n), dtype=np.int64)
    for s in design.sets:
        for i in s:
            out[i - 1, i - 1] += 2
        for i, j in combinations(s, 2):
            out[i - 1, j - 1] += 1
            out[j - 1, i - 1] += 1
    return out


def _check_sigma_identity(rng):
    for _ in range(100):
        n = int(rng.integers(2, 31))
        k = int(rng.integers(0, min(n, 5)))
        d = designs.random_generalized_design(n, k, rng)
        sigma = optima.sigma_from_design(d, 1.0)
        if not np.allclose(sigma, _shared_counts(d) / n, rtol=1e-12, atol=0):
            return False, f"mismatch for design {d.sets}"
    return True, "100 random designs"


def _check_variance_conservation(rng):
    for _ in range(100):
        n = int(rng.integers(2, 31))
        k = int(rng.integers(0, min(n, 5)))
        d = designs.random_generalized_design(n, k, rng)
        total = sum(v for _, v in walsh.coefficient_moments(d, 0, 1).values())
        if total != 1:
            return False, f"sum of variances {total} for {d.sets}"
    return True, "sum of Var[beta_U] == sigma^2 exactly"


def _quick_checks(suite: _Suite, seed: int):
    rng = np.random.default_rng(seed)
    ex = EXAMPLE_DESIGN
    suite.run("landscape", "example model matrix", lambda: (
        np.array_equal(model_matrix(ex), EXAMPLE_MODEL_MATRIX), "8x12 exact"))
    suite.run("walsh", "example walsh matrix", lambda: (
        np.array_equal(walsh.walsh_matrix(ex, EXAMPLE_WALSH_TERMS), EXAMPLE_WALSH_MATRIX),
        "8x7 exact"))
    suite.run("walsh", "rank anchors", lambda: (
        (walsh.rank(designs.maximal_design(7, 2)), walsh.rank(designs.adjacent_design(7, 2)),
         walsh.rank(ex)) == (36, 29, 7), "36/29/7"))
    suite.run("walsh", "coefficient variance anchors", lambda: (
        walsh.coefficient_moments(DESIGN_A, 0, 1, terms=[(1,)])[(1,)][1] == Fraction(7, 80)
        and walsh.coefficient_moments(DESIGN_B, 0, 1, terms=[(1,)])[(1,)][1] == Fraction(5, 80),
        "7/16N and 5/16N at N=5"))
    suite.run("walsh", "variance conservation", lambda: _check_variance_conservation(rng))
    suite.run("walsh", "column spaces of F and F~", lambda: (
        walsh.column_spaces_equal(model_matrix(ex), walsh.walsh_matrix(ex)), "N=3 example"))
    suite.run("designs", "tabulated difference sets", lambda: (
        all(designs.is_difference_set(e.elements, m)
            for e in designs.DIFFERENCE_SETS.values() for m in (e.min_n, e.min_n + 1, 2 * e.min_n)),
        "K=2..9"))

    def translates():
        for k, e in designs.DIFFERENCE_SETS.items():
            if k > 6:
                continue
            d = designs.translate_design(e.elements, e.min_n)
            if not designs.is_packing(d) or walsh.rank(d) != walsh.max_rank_bound(e.min_n, k):
                return False, f"K={k}"
        return True, "K=2..6 at threshold N"
    suite.run("designs", "translates are maximal packings", translates)
    suite.run("optima", "sigma identity", lambda: _check_sigma_identity(rng))

    def bivariate():
        worst = 0.0
        for rho in np.arange(-0.9, 0.91, 0.3):
            est = mvn.orthant([[1, rho], [rho, 1]], seed=seed)
            worst = max(worst, abs(est.value - (0.25 + math.asin(rho) / (2 * math.pi))))
        return worst <= 1e-4, f"max abs err {worst:.2e}"
    suite.run("orthant", "bivariate closed form", bivariate)

    def k_limits():
        e0 = optima.expected_local_optima(designs.adjacent_design(10, 0)).expected
        full = optima.expected_local_optima(designs.adjacent_design(8, 7))
        ok = abs(e0 - 1) <= 1e-3 and abs(full.expected - 256 / 9) <= max(full.expected_error, 1e-3)
        return ok, f"K=0: {e0:.6f}, K=N-1: {full.expected:.4f} vs {256 / 9:.4f}"
    suite.run("optima", "K limits", k_limits)


def _full_checks(suite: _Suite, seed: int):
    def brute_force():
        d = designs.random_classic_design(10, 2, seed)
        rep = optima.expected_local_optima(d, seed=seed)
        mean, se = optima.monte_carlo_expected_optima(d, replicates=2000, seed=seed)
        gap = abs(mean - rep.expected)
        return gap <= 4 * (se + rep.expected_error), f"MC {mean:.3f}+-{se:.3f} vs {rep.expected:.3f}"
    suite.run("optima", "N=10 K=2 brute force vs analytic", brute_force)

    def coefficient_moments_mc():
        d = designs.random_classic_design(8, 2, seed)
        m = 2000
        rng = np.random.default_rng(seed)
        W = rng.normal(0.0, math.sqrt(1 / 8), size=(m, d.n_weights))
        beta = walsh.extract_coefficients(d, W)
        mom = walsh.coefficient_moments(d, 0.0, 1.0)
        var = np.array([float(v) for _, v in mom.values()])
        zmean = np.abs(beta.mean(0)) / np.sqrt(var / m)
        zvar = np.abs(beta.var(0, ddof=1) - var) / (var * math.sqrt(2 / (m - 1)))
        corr = np.corrcoef(beta.T)[np.triu_indices(len(var), 1)]
        ok = zmean.max() < 4 and zvar.max() < 4 and np.abs(corr).max() < 4 / math.sqrt(m)
        return ok, f"max z: mean {zmean.max():.2f}, var {zvar.max():.2f}"
    suite.run("walsh", "empirical coefficient moments", coefficient_moments_mc)


def verify(level: str = "quick", seed: int = 0) -> list:
    """Run the invariant checks; returns a list of :class:`CheckResult`."""
    if level not in ("quick", "full"):
        raise ParameterError(f"level must be 'quick' or 'full', got {level!r}")
    suite = _Suite()
    _quick_checks(suite, seed)
    if level == "full":
        _full_checks(suite, seed)
    return suite.results
