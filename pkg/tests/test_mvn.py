import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from scipy.stats import random_correlation

from nklandscapes.errors import ParameterError, SingularCovarianceError
from nklandscapes.mvn import (OrthantEstimate, orthant, orthant_mc_fallback, pivoted_cholesky,
                              to_correlation)


def bivariate(rho):
    return 0.25 + np.arcsin(rho) / (2 * np.pi)


def equicorrelated(n, rho):
    return np.full((n, n), rho) + (1 - rho) * np.eye(n)


def plackett_orthant4(R):
    """Exact 4-D orthant probability by integrating Plackett's identity.

    Along ``R(t) = I + t (R - I)`` the derivative with respect to each
    correlation ``r_ij`` is the bivariate density at the origin times the
    orthant probability of the remaining pair conditioned on ``Z_i = Z_j = 0``.
    """
    R = np.asarray(R, dtype=float)
    pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]

    def rate(t):
        Rt = np.eye(4) + t * (R - np.eye(4))
        total = 0.0
        for i, j in pairs:
            rho = Rt[i, j]
            k, l = (m for m in range(4) if m not in (i, j))
            A = Rt[np.ix_([k, l], [i, j])]
            cond = Rt[np.ix_([k, l], [k, l])] - A @ np.linalg.solve(Rt[np.ix_([i, j], [i, j])], A.T)
            r = cond[0, 1] / np.sqrt(cond[0, 0] * cond[1, 1])
            density = 1.0 / (2 * np.pi * np.sqrt(1 - rho * rho))
            total += R[i, j] * density * bivariate(np.clip(r, -1, 1))
        return total

    value, _ = integrate.quad(rate, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    return 1 / 16 + value


def random_corr(rng, n):
    eig = rng.uniform(0.05, 1.0, n)
    return random_correlation.rvs(eig * n / eig.sum(), random_state=rng)


def test_plackett_oracle_self_checks():
    assert plackett_orthant4(np.eye(4)) == pytest.approx(1 / 16, abs=1e-14)
    assert plackett_orthant4(equicorrelated(4, 0.5)) == pytest.approx(1 / 5, abs=1e-10)
    # block-diagonal: product of two bivariate orthants
    R = np.eye(4)
    R[0, 1] = R[1, 0] = 0.3
    R[2, 3] = R[3, 2] = -0.6
    assert plackett_orthant4(R) == pytest.approx(bivariate(0.3) * bivariate(-0.6), abs=1e-10)


class TestExamples:
    @pytest.mark.parametrize("diag", [[1.0, 1.0], [2.0, 0.5, 7.0], [0.1] * 6, [3.0] * 12])
    def test_diagonal(self, diag):
        est = orthant(np.diag(diag), seed=0)
        assert abs(est.value - 2.0 ** -len(diag)) <= max(est.error, 1e-12)
        assert est.value == pytest.approx(2.0 ** -len(diag), abs=1e-12)

    @pytest.mark.parametrize("rho", [-0.95, -0.5, 0.0, 0.3, 0.5, 0.9, 0.99])
    def test_bivariate(self, rho):
        est = orthant([[1.0, rho], [rho, 1.0]], seed=1)
        assert abs(est.value - bivariate(rho)) <= max(est.error, 1e-4)
        assert abs(est.value - bivariate(rho)) <= 1e-4

    def test_bivariate_half_is_one_third(self):
        assert orthant([[2.0, 1.0], [1.0, 2.0]], seed=2).value == pytest.approx(1 / 3, abs=1e-4)

    def test_bivariate_closed_form_by_quadrature(self):
        rho = 0.5
        c = 1.0 / (2 * np.pi * np.sqrt(1 - rho ** 2))
        dens = lambda y, x: c * np.exp(-(x * x - 2 * rho * x * y + y * y) / (2 * (1 - rho ** 2)))
        val, _ = integrate.dblquad(dens, 0, 12, 0, 12, epsabs=1e-11)
        assert val == pytest.approx(bivariate(rho), abs=1e-9)

    @pytest.mark.parametrize("n", [3, 5, 10])
    def test_equicorrelated(self, n):
        est = orthant(equicorrelated(n, 0.5), seed=n)
        assert est.error <= 1e-4
        assert abs(est.value - 1 / (n + 1)) <= 1e-4

    def test_equicorrelated_against_monte_carlo(self):
        mc = orthant_mc_fallback(equicorrelated(3, 0.5), m=10 ** 6, seed=3)
        assert abs(mc.value - 0.25) <= mc.error

    def test_one_dimension(self):
        assert orthant([[4.0]]).value == 0.5


class TestErrors:
    def test_dimension_zero(self):
        with pytest.raises(ParameterError):
            orthant(np.zeros((0, 0)))

    def test_not_square_or_symmetric(self):
        with pytest.raises(ParameterError):
            orthant(np.ones((2, 3)))
        with pytest.raises(ParameterError):
            orthant([[1.0, 0.2], [0.3, 1.0]])

    def test_zero_variance(self):
        with pytest.raises(SingularCovarianceError) as info:
            orthant(np.diag([1.0, 0.0, 1.0]))
        assert info.value.pivot == 1

    def test_singular_carries_pivot(self):
        S = equicorrelated(4, 0.3)
        S = np.insert(np.insert(S, 4, S[2], axis=0), 4, np.append(S[2], 1.0), axis=1)
        with pytest.raises(SingularCovarianceError) as info:
            orthant(S)
        assert info.value.pivot in (2, 4)
        assert info.value.value <= 1e-10

    def test_not_psd(self):
        S = equicorrelated(3, -0.9)
        with pytest.raises(SingularCovarianceError):
            orthant(S)
        with pytest.raises(ParameterError):
            orthant_mc_fallback(S, m=10)

    def test_estimate_clipped(self):
        e = OrthantEstimate(1.2, -1.0, 0, 1)
        assert e.value == 1.0 and e.error == 0.0

    def test_too_few_replicates(self):
        with pytest.raises(ParameterError):
            orthant(np.eye(3), replicates=1)


class TestFactorization:
    def test_reconstructs_permuted_matrix(self):
        rng = np.random.default_rng(0)
        R = random_corr(rng, 7)
        L, perm = pivoted_cholesky(R)
        np.testing.assert_allclose(L @ L.T, R[np.ix_(perm, perm)], atol=1e-12)
        assert sorted(perm) == list(range(7))
        assert np.allclose(L, np.tril(L))

    def test_to_correlation(self):
        R = to_correlation([[4.0, 2.0], [2.0, 9.0]])
        np.testing.assert_allclose(R, [[1.0, 1 / 3], [1 / 3, 1.0]])


class TestProperties:
    def test_determinism(self):
        S = equicorrelated(6, 0.2)
        assert orthant(S, seed=5) == orthant(S, seed=5)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 8), st.floats(0.01, 100.0), st.integers(0, 2 ** 31))
    def test_scale_invariance(self, n, c, seed):
        R = random_corr(np.random.default_rng(seed), n)
        a, b = orthant(R, seed=seed), orthant(c * R, seed=seed + 1)
        assert abs(a.value - b.value) <= a.error + b.error + 1e-12

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 8), st.integers(0, 2 ** 31))
    def test_permutation_invariance(self, n, seed):
        rng = np.random.default_rng(seed)
        S = random_corr(rng, n) * np.outer(*(2 * [rng.uniform(0.5, 2.0, n)]))
        p = rng.permutation(n)
        a, b = orthant(S, seed=1), orthant(S[np.ix_(p, p)], seed=2)
        assert abs(a.value - b.value) <= a.error + b.error + 1e-12

    def test_monotone_in_correlation(self):
        vals = [orthant(equicorrelated(5, rho), seed=0, target_abs_err=1e-5)
                for rho in np.arange(10) / 10]
        for lo, hi in zip(vals, vals[1:]):
            assert hi.value >= lo.value - lo.error - hi.error
        assert vals[0].value == pytest.approx(1 / 32, abs=1e-6)

    def test_reported_error_is_honest(self):
        rng = np.random.default_rng(2024)
        misses = 0
        for trial in range(200):
            R = random_corr(rng, 4)
            est = orthant(R, seed=trial)
            misses += abs(est.value - plackett_orthant4(R)) > est.error
        assert misses / 200 < 0.02

    def test_relative_tolerance_stops_early(self):
        S = equicorrelated(12, 0.1)
        est = orthant(S, target_abs_err=0.0, target_rel_err=1e-2, seed=0)
        assert est.error <= 1e-2 * est.value
        assert est.samples < 1 << 22


class TestMonteCarloFallback:
    def test_identity(self):
        est = orthant_mc_fallback(np.eye(3), m=10 ** 6, seed=0)
        assert abs(est.value - 0.125) <= 0.0015
        assert est.error == pytest.approx(3.5 * np.sqrt(0.125 * 0.875 / 1e6), rel=0.05)

    def test_cross_validation(self):
        rng = np.random.default_rng(11)
        for trial in range(50):
            n = int(rng.integers(2, 9))
            A = rng.standard_normal((n, n + 2))
            S = A @ A.T
            mc = orthant_mc_fallback(S, m=2 * 10 ** 5, seed=trial)
            qmc_est = orthant(S, seed=trial)
            assert abs(mc.value - qmc_est.value) <= mc.error + qmc_est.error

    def test_duplicated_coordinate(self):
        reduced = equicorrelated(4, 0.4)
        reduced[0, 3] = reduced[3, 0] = -0.2
        S = np.insert(np.insert(reduced, 4, reduced[1], axis=0), 4, np.append(reduced[1], 1.0),
                      axis=1)
        assert np.linalg.matrix_rank(S) == 4
        mc = orthant_mc_fallback(S, m=10 ** 6, seed=7)
        exact = plackett_orthant4(reduced)
        assert abs(mc.value - exact) <= mc.error
        assert abs(orthant(reduced, seed=0).value - exact) <= 1e-4
