"""
SPD Matrix Helpers
==================
Positive definiteness is decided by Cholesky success. Determinants, solves
and inverses all go through a Cholesky factor.
"""

from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from model.errors import DimensionMismatchError, NotPositiveDefiniteError
from utils.logging_config import get_logger

logger = get_logger(__name__)

# p x p symmetric positive definite float array
SpdMatrix = NDArray[np.float64]

SYMMETRY_TOLERANCE = 1e-10


def as_matrix(value: Union[float, ArrayLike], label: str = "matrix") -> NDArray[np.float64]:
    """Coerce a scalar or nested list into a square 2-D float array."""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"{label} must be square, got shape {arr.shape}")
    return arr


def symmetrize(matrix: NDArray[np.float64], label: str = "matrix") -> NDArray[np.float64]:
    """Return (M + M^T)/2, warning when M was visibly asymmetric."""
    asymmetry = float(np.max(np.abs(matrix - matrix.T))) if matrix.size else 0.0
    if asymmetry > SYMMETRY_TOLERANCE:
        logger.warning(f"{label} asymmetric by {asymmetry:.3g}; averaging with its transpose")
    return 0.5 * (matrix + matrix.T)


def cholesky_factor(matrix: NDArray[np.float64], label: str = "matrix") -> NDArray[np.float64]:
    """Lower Cholesky factor, raising NotPositiveDefiniteError on failure."""
    if not np.all(np.isfinite(matrix)):
        raise NotPositiveDefiniteError(label, "non-finite entries")
    try:
        return linalg.cholesky(matrix, lower=True, check_finite=False)
    except linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(label, str(e)) from e


def as_spd(value: Union[float, ArrayLike], label: str = "matrix") -> SpdMatrix:
    """
    Validate and symmetrize an SPD matrix.

    Args:
        value: Scalar (p=1) or p x p nested sequence
        label: Name used in warnings and errors

    Returns:
        Symmetrized float array that passed a Cholesky factorization
    """
    matrix = symmetrize(as_matrix(value, label), label)
    cholesky_factor(matrix, label)
    return matrix


def is_spd(matrix: ArrayLike) -> bool:
    try:
        cholesky_factor(np.asarray(matrix, dtype=float))
    except NotPositiveDefiniteError:
        return False
    return True


def logdet_from_cholesky(chol: NDArray[np.float64]) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


def logdet_spd(matrix: NDArray[np.float64], label: str = "matrix") -> float:
    return logdet_from_cholesky(cholesky_factor(matrix, label))


def cholesky_solve(chol: NDArray[np.float64], rhs: NDArray[np.float64]) -> NDArray[np.float64]:
    """Solve (L L^T) X = rhs given the lower factor L."""
    return linalg.cho_solve((chol, True), rhs, check_finite=False)


def spd_inverse(matrix: NDArray[np.float64], label: str = "matrix") -> NDArray[np.float64]:
    """Inverse of an SPD matrix through its Cholesky factor."""
    chol = cholesky_factor(matrix, label)
    inverse = cholesky_solve(chol, np.eye(matrix.shape[0]))
    return 0.5 * (inverse + inverse.T)


def check_same_dim(a: NDArray[np.float64], b: NDArray[np.float64], labels=("A", "B")):
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"{labels[0]} has shape {a.shape} but {labels[1]} has shape {b.shape}"
        )
