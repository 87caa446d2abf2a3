"""
Unit tests for the SPD matrix helpers
"""
import logging

import numpy as np
import pytest

from model.errors import DimensionMismatchError, NotPositiveDefiniteError
from model.linalg import (
    as_matrix,
    as_spd,
    check_same_dim,
    cholesky_factor,
    cholesky_solve,
    is_spd,
    logdet_spd,
    spd_inverse,
    symmetrize,
)


class TestAsMatrix:
    """Tests for as_matrix"""

    def test_scalar_becomes_1x1(self):
        """Test a scalar is promoted to a 1x1 matrix"""
        assert as_matrix(3.5).shape == (1, 1)
        assert as_matrix(3.5)[0, 0] == 3.5

    def test_nested_list(self):
        """Test a nested list keeps its shape"""
        assert as_matrix([[1, 2], [3, 4]]).shape == (2, 2)

    def test_non_square_rejected(self):
        """Test a non-square input raises DimensionMismatchError"""
        with pytest.raises(DimensionMismatchError):
            as_matrix([[1, 2, 3], [4, 5, 6]])

    def test_vector_rejected(self):
        """Test a 1-D input is not a matrix"""
        with pytest.raises(DimensionMismatchError):
            as_matrix([1.0, 2.0])


class TestSpdChecks:
    """Tests for Cholesky-based positive definiteness"""

    def test_identity_is_spd(self):
        """Test the identity passes"""
        assert is_spd(np.eye(3))

    def test_indefinite_is_not_spd(self):
        """Test an indefinite matrix fails"""
        assert not is_spd([[1.0, 2.0], [2.0, 1.0]])

    def test_non_finite_raises(self):
        """Test NaN entries raise NotPositiveDefiniteError"""
        with pytest.raises(NotPositiveDefiniteError):
            cholesky_factor(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_error_names_the_matrix(self):
        """Test the error message carries the label"""
        with pytest.raises(NotPositiveDefiniteError, match="A_gen"):
            as_spd([[-1.0]], label="A_gen")

    def test_symmetrize_warns_on_asymmetry(self, caplog):
        """Test visible asymmetry is averaged away with a warning"""
        with caplog.at_level(logging.WARNING):
            result = symmetrize(np.array([[2.0, 1.0], [0.5, 2.0]]), label="V")
        np.testing.assert_allclose(result, [[2.0, 0.75], [0.75, 2.0]])
        assert "V asymmetric" in caplog.text

    def test_symmetrize_quiet_when_symmetric(self, caplog):
        """Test no warning for a symmetric input"""
        with caplog.at_level(logging.WARNING):
            symmetrize(np.eye(2))
        assert caplog.text == ""


class TestFactorizedOperations:
    """Tests for determinants, solves and inverses"""

    @pytest.fixture
    def spd(self):
        return np.array([[4.0, 1.2, 0.3], [1.2, 3.0, 0.5], [0.3, 0.5, 2.0]])

    def test_logdet_matches_slogdet(self, spd):
        """Test log determinant agrees with numpy"""
        sign, expected = np.linalg.slogdet(spd)
        assert sign == 1.0
        assert logdet_spd(spd) == pytest.approx(expected, rel=1e-12)

    def test_inverse(self, spd):
        """Test the inverse is symmetric and correct"""
        inverse = spd_inverse(spd)
        np.testing.assert_allclose(inverse @ spd, np.eye(3), atol=1e-12)
        np.testing.assert_array_equal(inverse, inverse.T)

    def test_cholesky_solve(self, spd):
        """Test solving against a Cholesky factor"""
        rhs = np.array([1.0, -2.0, 0.5])
        x = cholesky_solve(cholesky_factor(spd), rhs)
        np.testing.assert_allclose(spd @ x, rhs, atol=1e-12)

    def test_check_same_dim(self):
        """Test mismatched shapes are reported with their labels"""
        with pytest.raises(DimensionMismatchError, match="V0"):
            check_same_dim(np.eye(2), np.eye(3), ("A", "V0"))
