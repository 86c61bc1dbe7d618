"""Expected and observed numbers of local optima.

A genotype is a local optimum when its fitness strictly exceeds that of all
N one-bit neighbours. With normal weights the vector of fitness differences
to the neighbours is ``N(0, Sigma)`` with ``Sigma`` fixed by the design, so
the expected count is ``2**N`` times an orthant probability.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ParameterError, SingularCovarianceError
from .landscape import (DEFAULT_CAP, InteractionDesign, Landscape, _check_cap, draw_weights,
                        fitness_table, full_fitness_vector)
from .mvn import orthant, orthant_mc_fallback
from .walsh import rank

log = logging.getLogger(__name__)

REPORT_FIELDS = ("n", "k_min", "k_max", "design_type", "rank", "expected", "expected_error",
                 "observed_mean", "observed_se", "replicates", "seed")


def incidence(design: InteractionDesign) -> np.ndarray:
    """``M[k, i] = 1`` iff locus ``i+1`` is in ``V_{k+1}``."""
    M = np.zeros((len(design.sets), design.n), dtype=np.int64)
    for k, s in enumerate(design.sets):
        M[k, np.asarray(s) - 1] = 1
    return M


def sigma_counts(design: InteractionDesign) -> tuple:
    """Integer count matrices behind ``Sigma`` (before the ``sigma2/N`` scale).

    Returns
    -------
    two_case : ndarray
        ``2 a_i`` on the diagonal, ``a_i + a_j - |{k: i or j in V_k}|`` off it.
    shared : ndarray
        ``2 a_i`` on the diagonal, ``|{k: i and j in V_k}|`` off it.
    """
    M = incidence(design)
    a = M.sum(axis=0)
    neither = (1 - M).T @ (1 - M)
    union = M.shape[0] - neither
    two_case = a[:, None] + a[None, :] - union
    shared = M.T @ M
    np.fill_diagonal(two_case, 2 * a)
    np.fill_diagonal(shared, 2 * a)
    return two_case, shared


def sigma_from_design(design: InteractionDesign, sigma2: float = 1.0) -> np.ndarray:
    """Covariance of the N fitness differences between a genotype and its neighbours."""
    if not sigma2 > 0:
        raise ParameterError(f"sigma2 must be positive, got {sigma2}")
    two_case, shared = sigma_counts(design)
    if not np.array_equal(two_case, shared):
        raise AssertionError("union and intersection forms of Sigma disagree")
    return two_case * (sigma2 / design.n)


def sigma_identity_holds(design: InteractionDesign, sigma, sigma2: float = 1.0,
                         rtol: float = 1e-12) -> bool:
    """Check a covariance matrix against the shared-set count form."""
    _, shared = sigma_counts(design)
    return bool(np.allclose(sigma, shared * (sigma2 / design.n), rtol=rtol, atol=0))


@dataclass
class OptimaReport:
    n: int
    k_min: int
    k_max: int
    expected: float
    expected_error: float
    design_type: str = ""
    rank: int | None = None
    observed: int | None = None
    observed_mean: float | None = None
    observed_se: float | None = None
    replicates: int | None = None
    seed: int | None = None
    degraded: bool = False
    clt_approximation: bool = False
    note: str = "expected count depends only on N and Sigma"

    def row(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in REPORT_FIELDS}


def expected_local_optima(design: InteractionDesign, sigma2: float = 1.0, rel_err: float = 1e-3,
                          abs_err: float = 0.0, max_samples: int = 1 << 20, seed=0,
                          design_type: str = "", distribution: str = "normal") -> OptimaReport:
    """``2**N`` times the orthant probability of the difference covariance.

    ``rel_err`` and ``abs_err`` are tolerances on the expected count. Falls
    back to plain Monte Carlo (``degraded=True``) when the covariance is
    singular, e.g. a locus that belongs to no interaction set. The value is
    exact in expectation only for normal weights; for other distributions
    the report is flagged as a central-limit approximation.
    """
    sigma = sigma_from_design(design, sigma2)
    scale = 2.0 ** design.n
    degraded = False
    try:
        est = orthant(sigma, target_abs_err=abs_err / scale, target_rel_err=rel_err,
                      max_samples=max_samples, seed=seed)
    except SingularCovarianceError as exc:
        log.warning("singular covariance (%s); using Monte Carlo fallback", exc)
        est = orthant_mc_fallback(sigma, seed=seed)
        degraded = True
    ks = design.k_of
    return OptimaReport(n=design.n, k_min=min(ks), k_max=max(ks),
                        expected=est.value * scale, expected_error=est.error * scale,
                        design_type=design_type, rank=rank(design),
                        seed=None if seed is None else int(seed), degraded=degraded,
                        clt_approximation=distribution != "normal")


def _n_from_length(size: int) -> int:
    n = int(size).bit_length() - 1
    if n < 0 or 2 ** n != size:
        raise ParameterError(f"fitness vector length {size} is not a power of two")
    return n


def local_optimum_mask(p) -> np.ndarray:
    """Boolean mask of strict local optima; ``p`` is ``(2**N,)`` or ``(R, 2**N)``."""
    p = np.asarray(p)
    n = _n_from_length(p.shape[-1])
    idx = np.arange(p.shape[-1])
    mask = np.ones(p.shape, dtype=bool)
    for b in range(n):
        mask &= p > p[..., idx ^ (1 << b)]
    return mask


def is_local_optimum(p, j: int) -> bool:
    p = np.asarray(p)
    n = _n_from_length(p.shape[0])
    return all(p[j] > p[j ^ (1 << b)] for b in range(n))


def count_local_optima(ls: Landscape, cap: int | None = DEFAULT_CAP) -> int:
    return int(local_optimum_mask(full_fitness_vector(ls, cap)).sum())


def monte_carlo_expected_optima(design: InteractionDesign, sigma2: float = 1.0,
                                distribution: str = "normal", replicates: int = 2000, seed=None,
                                mu: float = 0.0, cap: int | None = DEFAULT_CAP,
                                chunk_cells: int = 1 << 22) -> tuple:
    """Mean and standard error of the local-optima count over random landscapes.

    Returns ``(mean, se)``; ``se`` is ``None`` for a single replicate.
    """
    _check_cap(design.n, cap)
    if replicates < 1:
        raise ParameterError("replicates must be >= 1")
    rng = np.random.default_rng(seed)
    per_chunk = max(1, chunk_cells // 2 ** design.n)
    counts = []
    left = replicates
    while left:
        r = min(left, per_chunk)
        W = draw_weights(rng, (r, design.n_weights), design.n, mu, sigma2, distribution)
        counts.append(local_optimum_mask(fitness_table(design, W, cap)).sum(axis=1))
        left -= r
    counts = np.concatenate(counts).astype(float)
    mean = float(counts.mean())
    if replicates == 1:
        return mean, None
    return mean, float(counts.std(ddof=1) / math.sqrt(replicates))
