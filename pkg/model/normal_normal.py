"""
Normal-Normal Model Algebra
===========================
Shrinkage matrices, conditional posterior moments, USP and conditional-A log
densities, and the conversions used to build generative grids.

    y_j | theta_j      ~ N_p(theta_j, V_j)
    theta_j | A, beta  ~ N_p(X_j^T beta, A)
    USP on A           ∝ |V0 + A|^-(p+1)
"""

from typing import TYPE_CHECKING, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from model.errors import (
    DimensionMismatchError,
    ImproperPosteriorError,
    NotPositiveDefiniteError,
    RankDeficientDesignError,
)
from model.linalg import (
    as_matrix,
    check_same_dim,
    cholesky_factor,
    cholesky_solve,
    logdet_from_cholesky,
    logdet_spd,
    spd_inverse,
)
from model.types import GaussianMoments, GroupObservation, HyperState, as_groups

if TYPE_CHECKING:
    from priors.usp import PriorSpec

LOG_2PI = float(np.log(2.0 * np.pi))


# ==================== SHRINKAGE ====================

def shrinkage_matrix(V: ArrayLike, A: ArrayLike) -> NDArray[np.float64]:
    """
    B = V (V + A)^-1, via a Cholesky solve against V + A.

    Args:
        V: Known sampling covariance (p x p, or scalar)
        A: Second-level covariance (p x p, or scalar)

    Returns:
        p x p shrinkage matrix with eigenvalues in (0, 1)
    """
    V = as_matrix(V, "V")
    A = as_matrix(A, "A")
    check_same_dim(V, A, ("V", "A"))
    chol = cholesky_factor(V + A, "V + A")
    # (V+A)^-1 V is the transpose of V (V+A)^-1 because both factors are symmetric
    return cholesky_solve(chol, V).T


def shrinkage_determinant(reference: ArrayLike, A: ArrayLike) -> float:
    """|R (R + A)^-1|, the scalar summary used to label bivariate grid points."""
    R = as_matrix(reference, "reference")
    A = as_matrix(A, "A")
    check_same_dim(R, A, ("reference", "A"))
    return float(np.exp(logdet_spd(R, "reference") - logdet_spd(R + A, "reference + A")))


# ==================== CONDITIONAL MOMENTS ====================

def theta_moments_batch(
    Y: NDArray[np.float64],
    V: NDArray[np.float64],
    A: NDArray[np.float64],
    prior_means: NDArray[np.float64],
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Conditional posterior moments of all k random effects at once.

    With S_j = V_j + A = L_j L_j^T:
        mean_j = y_j - V_j S_j^-1 (y_j - X_j^T beta)
        cov_j  = A S_j^-1 V_j = (L_j^-1 A)^T (L_j^-1 V_j)

    The covariance is a product, not a difference, so it stays accurate in
    both the A -> 0 and A -> infinity limits.

    Args:
        Y: k x p estimates
        V: k x p x p sampling covariances
        A: p x p second-level covariance
        prior_means: k x p rows X_j^T beta

    Returns:
        (means k x p, covariances k x p x p)
    """
    S = V + A
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError("V_j + A", str(e)) from e
    W = np.linalg.solve(L, np.broadcast_to(A, S.shape))
    Z = np.linalg.solve(L, V)
    R = np.linalg.solve(L, (Y - prior_means)[..., None])
    covs = np.swapaxes(W, 1, 2) @ Z
    covs = 0.5 * (covs + np.swapaxes(covs, 1, 2))
    means = Y - (np.swapaxes(Z, 1, 2) @ R)[..., 0]
    return means, covs


def conditional_theta_moments(obs: GroupObservation, state: HyperState) -> GaussianMoments:
    """
    theta_j | A, beta, y_j ~ N_p((I - B_j) y_j + B_j X_j^T beta, (I - B_j) V_j).

    Args:
        obs: One group's data
        state: Current (A, beta)

    Returns:
        GaussianMoments of the conditional posterior
    """
    if state.A.shape[0] != obs.p:
        raise DimensionMismatchError(f"A is {state.A.shape[0]}x{state.A.shape[0]}, p = {obs.p}")
    prior_mean = obs.regression_mean(state.beta)
    means, covs = theta_moments_batch(
        obs.y[None, :], obs.V[None, :, :], state.A, prior_mean[None, :]
    )
    return GaussianMoments(mean=means[0], cov=covs[0])


def design_gram_factor(X: NDArray[np.float64]) -> NDArray[np.float64]:
    """Cholesky factor of sum_j x_j x_j^T; fails when the covariates are collinear."""
    try:
        return cholesky_factor(X.T @ X, "covariate Gram matrix")
    except NotPositiveDefiniteError as e:
        raise RankDeficientDesignError(
            f"covariate design of rank {np.linalg.matrix_rank(X)} < m = {X.shape[1]}"
        ) from e


def conditional_beta_moments(
    dataset,
    thetas: ArrayLike,
    A: ArrayLike,
) -> GaussianMoments:
    """
    beta | A, theta, y ~ N_mp(mu_beta, Sigma_beta) under a flat prior on beta.

        Sigma_beta = (sum_j X_j A^-1 X_j^T)^-1 = (A^-1 kron X^T X)^-1
        mu_beta    = Sigma_beta sum_j X_j A^-1 theta_j

    Args:
        dataset: Dataset, or any non-empty sequence of GroupObservation
        thetas: k x p random effects
        A: p x p second-level covariance

    Returns:
        GaussianMoments of the conditional posterior of beta
    """
    groups = as_groups(dataset)
    X = np.stack([g.x for g in groups])
    k, m = X.shape
    p = groups[0].p
    thetas = np.asarray(thetas, dtype=float).reshape(k, p)
    A = as_matrix(A, "A")
    if A.shape[0] != p:
        raise DimensionMismatchError(f"A is {A.shape[0]}x{A.shape[0]}, p = {p}")

    A_inv = spd_inverse(A, "A")
    precision = np.kron(A_inv, X.T @ X)
    rhs = (A_inv @ thetas.T @ X).reshape(p * m)
    try:
        chol = cholesky_factor(precision, "beta precision")
    except NotPositiveDefiniteError as e:
        raise RankDeficientDesignError(
            f"sum_j X_j A^-1 X_j^T is singular (k={k}, m={m}, design rank "
            f"{np.linalg.matrix_rank(X)})"
        ) from e
    cov = cholesky_solve(chol, np.eye(p * m))
    mean = cholesky_solve(chol, rhs)
    return GaussianMoments(mean=mean, cov=0.5 * (cov + cov.T))


# ==================== LOG DENSITIES ====================

def log_usp_density(A: ArrayLike, V0: ArrayLike) -> float:
    """
    Unnormalized USP log density, -(p+1) log|V0 + A|.

    Args:
        A: p x p second-level covariance
        V0: p x p shape parameter

    Returns:
        Log density up to the dropped normalizing constant
    """
    A = as_matrix(A, "A")
    V0 = as_matrix(V0, "V0")
    check_same_dim(A, V0, ("A", "V0"))
    p = A.shape[0]
    return -(p + 1) * logdet_spd(V0 + A, "V0 + A")


def log_normal_likelihood_of_effects(
    A: NDArray[np.float64],
    residuals: NDArray[np.float64],
) -> float:
    """sum_j log N_p(theta_j | X_j^T beta, A) given the k x p residuals theta_j - X_j^T beta."""
    k, p = residuals.shape
    chol = cholesky_factor(A, "A")
    scaled = linalg.solve_triangular(chol, residuals.T, lower=True, check_finite=False)
    quad = float(np.sum(scaled * scaled))
    return -0.5 * k * p * LOG_2PI - 0.5 * k * logdet_from_cholesky(chol) - 0.5 * quad


def log_conditional_A_density(
    A: ArrayLike,
    dataset,
    thetas: ArrayLike,
    beta: ArrayLike,
    prior: "PriorSpec",
) -> float:
    """
    log pi_c(A | beta, theta, y) up to a constant shared across A.

    Args:
        A: Candidate p x p second-level covariance
        dataset: Dataset the effects belong to
        thetas: k x p random effects
        beta: Regression coefficients (length mp)
        prior: USP or improper flat prior on A

    Returns:
        Sum of the k Gaussian log densities plus the prior log density
    """
    A = as_matrix(A, "A")
    thetas = np.asarray(thetas, dtype=float).reshape(dataset.k, dataset.p)
    residuals = thetas - dataset.regression_means(beta)
    value = log_normal_likelihood_of_effects(A, residuals)
    if not prior.is_flat:
        value += log_usp_density(A, prior.V0)
    return value


def scatter_matrix(
    dataset,
    thetas: ArrayLike,
    beta: ArrayLike,
) -> NDArray[np.float64]:
    """S = sum_j (theta_j - X_j^T beta)(theta_j - X_j^T beta)^T."""
    thetas = np.asarray(thetas, dtype=float).reshape(dataset.k, dataset.p)
    residuals = thetas - dataset.regression_means(beta)
    return residuals.T @ residuals


# ==================== GRID CONVERSIONS ====================

def b0_to_A_univariate(B0: float, V0: float) -> float:
    """
    A = (1 - B0) V0 / B0.

    Args:
        B0: Reference shrinkage factor in (0, 1]
        V0: Reference variance (> 0)

    Returns:
        Second-level variance; 0 exactly when B0 = 1
    """
    if not 0.0 < B0 <= 1.0:
        raise ValueError(f"B0 must lie in (0, 1], got {B0}")
    if not V0 > 0.0:
        raise ValueError(f"V0 must be positive, got {V0}")
    return (1.0 - B0) * V0 / B0


def A_to_b0_univariate(A: float, V0: float) -> float:
    """B0 = V0 / (V0 + A)."""
    if A < 0.0:
        raise ValueError(f"A must be nonnegative, got {A}")
    return V0 / (V0 + A)


def propriety_check(k: int, p: int, m: int) -> bool:
    """True iff the joint posterior is proper, k > p + m + 1."""
    return k > p + m + 1


def require_propriety(k: int, p: int, m: int):
    if not propriety_check(k, p, m):
        raise ImproperPosteriorError(
            f"posterior is improper: k={k} groups needs k > p + m + 1 = {p + m + 1}"
        )


def stack_intervals(intervals: Sequence[Tuple[float, float]]) -> Tuple[NDArray, NDArray]:
    """Split a list of (low, upp) pairs into lower and upper bound vectors."""
    bounds = np.asarray(intervals, dtype=float).reshape(-1, 2)
    return bounds[:, 0], bounds[:, 1]
