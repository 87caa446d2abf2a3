"""
Unit tests for the Normal-Normal model algebra
"""
import math

import numpy as np
import pytest

from model.errors import ImproperPosteriorError, RankDeficientDesignError
from model.normal_normal import (
    A_to_b0_univariate,
    b0_to_A_univariate,
    conditional_beta_moments,
    conditional_theta_moments,
    design_gram_factor,
    log_conditional_A_density,
    log_usp_density,
    propriety_check,
    require_propriety,
    scatter_matrix,
    shrinkage_determinant,
    shrinkage_matrix,
    theta_moments_batch,
)
from model.types import Dataset, GroupObservation, HyperState
from priors.usp import flat_prior, usp_prior


class TestShrinkage:
    """Tests for shrinkage matrices"""

    def test_univariate(self):
        """Test B = V / (V + A)"""
        assert shrinkage_matrix(100.0, 300.0)[0, 0] == pytest.approx(0.25)

    def test_eigenvalues_inside_unit_interval(self):
        """Test B has eigenvalues in (0, 1)"""
        V = np.array([[2.0, 0.5], [0.5, 1.0]])
        A = np.array([[1.0, -0.2], [-0.2, 3.0]])
        eigenvalues = np.linalg.eigvals(shrinkage_matrix(V, A))
        assert np.all(eigenvalues.real > 0.0)
        assert np.all(eigenvalues.real < 1.0)

    def test_determinant_of_scaled_reference(self):
        """Test |R (R + R/u)^-1| = (u / (u + 1))^p"""
        sigma = np.array([[148.87, 140.43], [140.43, 490.60]])
        assert shrinkage_determinant(sigma, sigma / 1.0) == pytest.approx(0.25)
        assert shrinkage_determinant(sigma, sigma / 0.29) == pytest.approx((0.29 / 1.29) ** 2)


class TestThetaMoments:
    """Tests for the conditional posterior of theta_j"""

    def test_univariate_closed_form(self):
        """Test mean (1-B) y + B mu and variance (1-B) V"""
        group = GroupObservation(y=10.0, V=100.0, x=1.0)
        moments = conditional_theta_moments(group, HyperState(A=[[300.0]], beta=[2.0]))
        assert moments.mean[0] == pytest.approx(8.0)
        assert moments.cov[0, 0] == pytest.approx(75.0)

    def test_multivariate_closed_form(self):
        """Test against the explicit (I - B) formulas"""
        V = np.array([[2.0, 0.5], [0.5, 1.0]])
        A = np.array([[1.0, -0.2], [-0.2, 3.0]])
        group = GroupObservation(y=[1.0, -2.0], V=V, x=[1.0])
        state = HyperState(A=A, beta=[0.5, 0.25])
        moments = conditional_theta_moments(group, state)

        B = V @ np.linalg.inv(V + A)
        identity = np.eye(2)
        expected_mean = (identity - B) @ group.y + B @ np.array([0.5, 0.25])
        expected_cov = (identity - B) @ V
        np.testing.assert_allclose(moments.mean, expected_mean, atol=1e-12)
        np.testing.assert_allclose(moments.cov, expected_cov, atol=1e-12)

    def test_small_A_limit(self):
        """Test A -> 0 pulls theta onto the regression mean with a tiny SPD covariance"""
        group = GroupObservation(y=10.0, V=100.0, x=1.0)
        moments = conditional_theta_moments(group, HyperState(A=[[1e-10]], beta=[2.0]))
        assert moments.mean[0] == pytest.approx(2.0, abs=1e-8)
        assert 0.0 < moments.cov[0, 0] < 1e-9

    def test_large_A_limit(self):
        """Test A -> infinity leaves theta at y with variance V"""
        group = GroupObservation(y=10.0, V=100.0, x=1.0)
        moments = conditional_theta_moments(group, HyperState(A=[[1e12]], beta=[2.0]))
        assert moments.mean[0] == pytest.approx(10.0, rel=1e-8)
        assert moments.cov[0, 0] == pytest.approx(100.0, rel=1e-8)

    def test_batch_matches_single(self, small_bivariate_dataset):
        """Test the batched moments equal the per-group ones"""
        data = small_bivariate_dataset
        state = HyperState(A=[[1.0, 0.3], [0.3, 2.0]], beta=[1.0, 2.0, -1.0, 1.0])
        means, covs = theta_moments_batch(data.Y, data.V, state.A, data.regression_means(state.beta))
        for j, group in enumerate(data.groups):
            single = conditional_theta_moments(group, state)
            np.testing.assert_allclose(means[j], single.mean, atol=1e-12)
            np.testing.assert_allclose(covs[j], single.cov, atol=1e-12)


class TestBetaMoments:
    """Tests for the conditional posterior of beta"""

    def test_intercept_only(self):
        """Test mean of the thetas with variance A / k"""
        groups = [GroupObservation(y=0.0, V=1.0, x=1.0) for _ in range(4)]
        moments = conditional_beta_moments(groups, [1.0, 2.0, 3.0, 6.0], [[4.0]])
        assert moments.mean[0] == pytest.approx(3.0)
        assert moments.cov[0, 0] == pytest.approx(1.0)

    def test_matches_explicit_sum(self, small_bivariate_dataset):
        """Test against sum_j X_j A^-1 X_j^T built block by block"""
        data = small_bivariate_dataset
        A = np.array([[1.5, 0.4], [0.4, 0.8]])
        thetas = data.Y + 0.1
        A_inv = np.linalg.inv(A)
        precision = sum(g.design_matrix @ A_inv @ g.design_matrix.T for g in data.groups)
        rhs = sum(g.design_matrix @ A_inv @ t for g, t in zip(data.groups, thetas))
        expected_cov = np.linalg.inv(precision)

        moments = conditional_beta_moments(data, thetas, A)
        np.testing.assert_allclose(moments.cov, expected_cov, rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(moments.mean, expected_cov @ rhs, rtol=1e-10, atol=1e-10)

    def test_collinear_design(self):
        """Test duplicate covariate columns are reported"""
        X = np.array([[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]])
        with pytest.raises(RankDeficientDesignError):
            design_gram_factor(X)


class TestLogDensities:
    """Tests for the USP and conditional A densities"""

    def test_usp_univariate(self):
        """Test -(p+1) log(V0 + A) for p = 1"""
        assert log_usp_density([[3.0]], [[1.0]]) == pytest.approx(-2.0 * math.log(4.0))

    def test_usp_bivariate(self):
        """Test -(p+1) log|V0 + A| for p = 2"""
        A = np.array([[2.0, 0.5], [0.5, 1.0]])
        V0 = np.eye(2)
        expected = -3.0 * np.log(np.linalg.det(V0 + A))
        assert log_usp_density(A, V0) == pytest.approx(expected)

    def test_flat_and_usp_differ_by_prior(self, eight_schools_dataset):
        """Test the USP conditional adds exactly the USP log density"""
        data = eight_schools_dataset
        thetas = data.Y.copy()
        prior = usp_prior([[132.644205]])
        for A in (10.0, 200.0, 5000.0):
            usp = log_conditional_A_density(A, data, thetas, [8.0], prior)
            flat = log_conditional_A_density(A, data, thetas, [8.0], flat_prior())
            assert usp - flat == pytest.approx(log_usp_density([[A]], prior.V0))

    def test_scatter_matrix(self, eight_schools_dataset):
        """Test S = sum of outer products of residuals"""
        data = eight_schools_dataset
        S = scatter_matrix(data, data.Y, [8.75])
        expected = float(np.sum((data.Y[:, 0] - 8.75) ** 2))
        assert S.shape == (1, 1)
        assert S[0, 0] == pytest.approx(expected)


class TestConversions:
    """Tests for B0 <-> A conversions and propriety"""

    def test_b0_to_A(self):
        """Test A = (1 - B0) V0 / B0"""
        assert b0_to_A_univariate(0.25, 132.644205) == pytest.approx(397.93, abs=0.01)

    def test_full_shrinkage_boundary(self):
        """Test B0 = 1 gives A = 0"""
        assert b0_to_A_univariate(1.0, 132.644205) == 0.0

    def test_round_trip(self):
        """Test the two conversions invert each other"""
        for b0 in (0.05, 0.5, 0.95):
            A = b0_to_A_univariate(b0, 50.0)
            assert A_to_b0_univariate(A, 50.0) == pytest.approx(b0)

    def test_invalid_b0(self):
        """Test B0 outside (0, 1] is rejected"""
        with pytest.raises(ValueError):
            b0_to_A_univariate(0.0, 1.0)
        with pytest.raises(ValueError):
            b0_to_A_univariate(1.5, 1.0)

    def test_propriety(self):
        """Test k > p + m + 1"""
        assert propriety_check(8, 1, 1)
        assert propriety_check(27, 2, 2)
        assert not propriety_check(3, 1, 1)
        with pytest.raises(ImproperPosteriorError):
            require_propriety(5, 2, 2)

    def test_eight_schools_is_proper(self, eight_schools_dataset):
        """Test the shipped univariate data passes the propriety check"""
        data = eight_schools_dataset
        assert propriety_check(data.k, data.p, data.m)

    def test_two_group_dataset_is_improper(self):
        """Test a minimal dataset fails the propriety check"""
        data = Dataset(groups=[GroupObservation(y=v, V=1.0, x=1.0) for v in (0.0, 1.0)])
        with pytest.raises(ImproperPosteriorError):
            require_propriety(data.k, data.p, data.m)
