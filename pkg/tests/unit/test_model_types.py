"""
Unit tests for groups, datasets and hyperparameter states
"""
import numpy as np
import pytest

from model.errors import DatasetError, DimensionMismatchError, NotPositiveDefiniteError
from model.types import Dataset, GaussianMoments, GroupObservation, HyperState


class TestGroupObservation:
    """Tests for GroupObservation validation"""

    def test_scalar_inputs(self):
        """Test p=1 groups accept scalars"""
        group = GroupObservation(y=3.0, V=4.0, x=1.0)
        assert group.p == 1
        assert group.m == 1
        assert group.V.shape == (1, 1)

    def test_covariance_size_must_match(self):
        """Test V must be p x p"""
        with pytest.raises(DimensionMismatchError):
            GroupObservation(y=[1.0, 2.0], V=[[1.0]], x=[1.0])

    def test_covariance_must_be_spd(self):
        """Test a non-SPD V is rejected"""
        with pytest.raises(NotPositiveDefiniteError):
            GroupObservation(y=[1.0, 2.0], V=[[1.0, 3.0], [3.0, 1.0]], x=[1.0])

    def test_design_matrix_is_block_diagonal(self):
        """Test X_j = kron(I_p, x_j)"""
        group = GroupObservation(y=[1.0, 2.0], V=np.eye(2), x=[1.0, 0.5])
        expected = np.array([[1.0, 0.0], [0.5, 0.0], [0.0, 1.0], [0.0, 0.5]])
        np.testing.assert_array_equal(group.design_matrix, expected)

    def test_regression_mean_component_major(self):
        """Test beta is read component by component"""
        group = GroupObservation(y=[1.0, 2.0], V=np.eye(2), x=[1.0, 0.5])
        np.testing.assert_allclose(group.regression_mean([1.0, 2.0, 3.0, 4.0]), [2.0, 5.0])
        np.testing.assert_allclose(group.design_matrix.T @ [1.0, 2.0, 3.0, 4.0], [2.0, 5.0])

    def test_regression_mean_wrong_length(self):
        """Test beta must have m*p entries"""
        group = GroupObservation(y=[1.0], V=[[1.0]], x=[1.0, 2.0])
        with pytest.raises(DimensionMismatchError):
            group.regression_mean([1.0])


class TestDataset:
    """Tests for Dataset invariants"""

    def test_needs_two_groups(self):
        """Test a single group is not a dataset"""
        with pytest.raises(DatasetError):
            Dataset(groups=[GroupObservation(y=1.0, V=1.0, x=1.0)])

    def test_groups_share_dimensions(self):
        """Test a group with another p names its position"""
        groups = [
            GroupObservation(y=1.0, V=1.0, x=1.0),
            GroupObservation(y=[1.0, 2.0], V=np.eye(2), x=1.0),
        ]
        with pytest.raises(DatasetError) as excinfo:
            Dataset(groups=groups)
        assert excinfo.value.group == 2

    def test_stacked_views(self, small_bivariate_dataset):
        """Test Y, V and X stack the groups in order"""
        data = small_bivariate_dataset
        assert data.Y.shape == (8, 2)
        assert data.V.shape == (8, 2, 2)
        assert data.X.shape == (8, 2)
        np.testing.assert_array_equal(data.Y[3], data.groups[3].y)

    def test_regression_means_match_groups(self, small_bivariate_dataset):
        """Test the vectorized means equal the per-group ones"""
        beta = np.array([1.0, 2.0, -1.0, 0.5])
        stacked = small_bivariate_dataset.regression_means(beta)
        for j, group in enumerate(small_bivariate_dataset.groups):
            np.testing.assert_allclose(stacked[j], group.regression_mean(beta))

    def test_with_y_keeps_covariances(self, eight_schools_dataset):
        """Test new estimates reuse V_j and x_j"""
        mock = eight_schools_dataset.with_y(np.zeros(8), label="mock")
        assert mock.label == "mock"
        np.testing.assert_array_equal(mock.V, eight_schools_dataset.V)
        np.testing.assert_array_equal(mock.Y, np.zeros((8, 1)))


class TestStates:
    """Tests for HyperState and GaussianMoments"""

    def test_hyper_state_symmetrizes(self):
        """Test A is symmetrized on construction"""
        state = HyperState(A=[[2.0, 1.0], [1.0 + 1e-14, 3.0]], beta=[0.0, 0.0])
        np.testing.assert_array_equal(state.A, state.A.T)

    def test_hyper_state_rejects_indefinite(self):
        """Test A must be SPD"""
        with pytest.raises(NotPositiveDefiniteError):
            HyperState(A=[[0.0]], beta=[0.0])

    def test_moments_dimension_check(self):
        """Test mean and covariance sizes must agree"""
        with pytest.raises(DimensionMismatchError):
            GaussianMoments(mean=[0.0, 0.0], cov=[[1.0]])
