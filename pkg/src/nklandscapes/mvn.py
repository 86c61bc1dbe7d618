"""Multivariate normal orthant probabilities ``P(Z > 0)``, ``Z ~ N(0, Sigma)``.

The estimator follows the usual sequential-conditioning recipe: rescale to a
correlation matrix, pivot the Cholesky factorization so the least likely
variable is integrated first, map the orthant to the unit cube by
conditioning one coordinate at a time, and integrate the resulting smooth
integrand with independently scrambled Sobol' point sets. The spread of the
replicate means gives the error estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri
from scipy.stats import qmc

from .errors import ParameterError, SingularCovarianceError

ERROR_SIGMAS = 3.5
_PIVOT_TOL = 1e-10
_EIG_TOL = 1e-10
_BLOCK = 1 << 15
_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class OrthantEstimate:
    """Probability estimate with a 3.5-sigma absolute error bound."""

    value: float
    error: float
    samples: int
    replicates: int

    def __post_init__(self):
        object.__setattr__(self, "value", float(min(max(self.value, 0.0), 1.0)))
        object.__setattr__(self, "error", float(max(self.error, 0.0)))


def _validate(sigma) -> np.ndarray:
    S = np.array(sigma, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ParameterError(f"covariance must be square, got shape {S.shape}")
    if S.shape[0] == 0:
        raise ParameterError("covariance has dimension 0")
    if not np.allclose(S, S.T, rtol=1e-12, atol=1e-12 * np.max(np.abs(S))):
        raise ParameterError("covariance must be symmetric")
    return S


def to_correlation(sigma) -> np.ndarray:
    S = _validate(sigma)
    d = np.diag(S)
    if np.any(d <= 0):
        i = int(np.argmin(d))
        raise SingularCovarianceError(i, float(d[i]))
    s = 1.0 / np.sqrt(d)
    R = S * s[:, None] * s[None, :]
    np.fill_diagonal(R, 1.0)
    return R


def pivoted_cholesky(R) -> tuple:
    """Cholesky factor of ``R`` with greedy least-probable-first ordering.

    Returns ``(L, perm)`` with ``R[perm][:, perm] = L @ L.T``. Raises
    :class:`SingularCovarianceError` naming the original index of the first
    pivot whose conditional variance is not positive.
    """
    R = np.array(R, dtype=float)
    n = R.shape[0]
    C = R.copy()
    L = np.zeros((n, n))
    y = np.zeros(n)
    perm = np.arange(n)
    for i in range(n):
        rest = np.arange(i, n)
        cvar = np.diag(C)[rest] - np.sum(L[rest, :i] ** 2, axis=1)
        shift = L[rest, :i] @ y[:i]
        with np.errstate(divide="ignore", invalid="ignore"):
            prob = ndtr(-shift / np.sqrt(np.maximum(cvar, 0.0)))
        prob[cvar <= _PIVOT_TOL] = np.inf
        j = i + int(np.argmin(prob)) if np.isfinite(prob).any() else i
        if j != i:
            C[[i, j]] = C[[j, i]]
            C[:, [i, j]] = C[:, [j, i]]
            L[[i, j]] = L[[j, i]]
            perm[[i, j]] = perm[[j, i]]
        piv = C[i, i] - L[i, :i] @ L[i, :i]
        if piv <= _PIVOT_TOL:
            raise SingularCovarianceError(int(perm[i]), float(piv))
        lii = np.sqrt(piv)
        L[i, i] = lii
        L[i + 1:, i] = (C[i + 1:, i] - L[i + 1:, :i] @ L[i, :i]) / lii
        u = -(L[i, :i] @ y[:i]) / lii
        # mean of a standard normal truncated above at u
        y[i] = -np.exp(-0.5 * u * u) / _SQRT_2PI / max(ndtr(u), 1e-300)
    return L, perm


def _integrand(L, w):
    """Product of conditional probabilities for points ``w`` in ``[0,1)^(n-1)``."""
    n = L.shape[0]
    m = w.shape[0]
    y = np.empty((m, n - 1))
    f = np.full(m, 0.5)
    e = np.full(m, 0.5)
    for i in range(1, n):
        y[:, i - 1] = ndtri(np.clip(w[:, i - 1] * e, 1e-300, 1.0 - 1e-16))
        e = ndtr(-(y[:, :i] @ L[i, :i]) / L[i, i])
        f *= e
    return f


def orthant(sigma, target_abs_err: float = 1e-4, max_samples: int = 1 << 22, seed=None,
            replicates: int = 12, target_rel_err: float = 0.0,
            initial_samples: int = 1 << 10) -> OrthantEstimate:
    """Estimate ``P(Z > 0)`` for ``Z ~ N(0, sigma)``.

    Sampling doubles the points per replicate until the error bound is at
    most ``max(target_abs_err, target_rel_err * value)`` or ``max_samples``
    points per replicate have been used.

    Parameters
    ----------
    sigma : array_like, shape (n, n)
        Symmetric positive definite covariance.
    target_abs_err, target_rel_err : float
        Stopping tolerances on the 3.5-sigma error.
    max_samples : int
        Cap on points per replicate (rounded to a power of two).
    seed : int or SeedSequence, optional
        Fixes every replicate's scrambling.
    replicates : int
        Number of independent randomizations (at least 12 recommended).

    Returns
    -------
    OrthantEstimate
    """
    if replicates < 2:
        raise ParameterError("need at least 2 replicates for an error estimate")
    R = to_correlation(sigma)
    n = R.shape[0]
    if n == 1:
        return OrthantEstimate(0.5, 0.0, 0, replicates)
    L, _ = pivoted_cholesky(R)
    children = np.random.SeedSequence(seed).spawn(replicates)
    engines = [qmc.Sobol(d=n - 1, scramble=True, seed=np.random.default_rng(c))
               for c in children]
    sums = np.zeros(replicates)
    total = 0
    batch = 1 << max(int(np.log2(max(initial_samples, 2))), 1)
    max_samples = max(int(max_samples), batch)
    while True:
        for r, eng in enumerate(engines):
            left = batch
            while left:
                m = min(left, _BLOCK)
                sums[r] += _integrand(L, eng.random(m)).sum()
                left -= m
        total += batch
        means = sums / total
        value = means.mean()
        error = ERROR_SIGMAS * means.std(ddof=1) / np.sqrt(replicates)
        if error <= max(target_abs_err, target_rel_err * value) or 2 * total > max_samples:
            return OrthantEstimate(value, error, total, replicates)
        batch = total


def orthant_mc_fallback(sigma, m: int = 10 ** 6, seed=None) -> OrthantEstimate:
    """Plain Monte Carlo orthant estimate; tolerates singular (PSD) covariances.

    Draws use the symmetric square root from an eigendecomposition, with
    slightly negative eigenvalues clipped to zero.
    """
    S = _validate(sigma)
    vals, vecs = np.linalg.eigh(S)
    floor = -_EIG_TOL * max(1.0, float(np.max(np.abs(vals))))
    if np.any(vals < floor):
        raise ParameterError(f"covariance has a negative eigenvalue {vals.min():.3g}")
    root = vecs * np.sqrt(np.clip(vals, 0.0, None))
    rng = np.random.default_rng(seed)
    hits = 0
    left = int(m)
    while left:
        k = min(left, 1 << 16)
        z = rng.standard_normal((k, S.shape[0])) @ root.T
        hits += int(np.count_nonzero(np.all(z > 0, axis=1)))
        left -= k
    p = hits / m
    return OrthantEstimate(p, ERROR_SIGMAS * np.sqrt(p * (1 - p) / m), int(m), 1)
