"""
Distribution Primitives
=======================
Sampling and log densities for the multivariate normal and inverse Wishart
distributions, plus normal and bivariate-normal rectangle probabilities.

Every sampler takes an explicit RngStream; there is no module-level RNG.
"""

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg
from scipy.special import multigammaln, ndtr

from model.errors import (
    DimensionMismatchError,
    NotPositiveDefiniteError,
    UnsupportedDimensionError,
)
from model.linalg import as_matrix, as_spd, cholesky_factor, logdet_from_cholesky
from model.types import GaussianMoments
from stochastics.bivariate_normal import bivariate_rectangle
from stochastics.rng import RngStream

LOG_2 = float(np.log(2.0))


# ==================== NORMAL ====================

def std_normal_cdf(x: float) -> float:
    """Phi(x), accurate in both tails (erfc based)."""
    return float(ndtr(x))


def sample_mvn(moments: GaussianMoments, rng: RngStream) -> NDArray[np.float64]:
    """
    One draw mean + L z with L the lower Cholesky factor of the covariance.

    Args:
        moments: Mean and covariance
        rng: Random stream (consumes moments.dim standard normals)

    Returns:
        Vector of length moments.dim
    """
    chol = cholesky_factor(moments.cov, "covariance")
    z = rng.standard_normal(moments.dim)
    return moments.mean + chol @ z


def sample_mvn_batch(
    means: NDArray[np.float64],
    covs: NDArray[np.float64],
    rng: RngStream,
) -> NDArray[np.float64]:
    """
    Independent draws for a stack of k Gaussians, one k x p block of normals.

    Args:
        means: k x p
        covs: k x p x p

    Returns:
        k x p draws
    """
    k, p = means.shape
    try:
        chols = np.linalg.cholesky(covs)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError("conditional covariance", str(e)) from e
    z = rng.standard_normal((k, p))
    return means + (chols @ z[..., None])[..., 0]


def mvn_rectangle_prob(
    moments: GaussianMoments,
    lower: ArrayLike,
    upper: ArrayLike,
) -> float:
    """
    P(lower < theta < upper) for theta ~ N_p(mean, cov), p in {1, 2}.

    Limits may be infinite. A rectangle with any lower == upper has
    probability zero.

    Args:
        moments: Gaussian to integrate
        lower: Length-p lower limits
        upper: Length-p upper limits

    Returns:
        Probability in [0, 1]
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    p = moments.dim
    if lower.shape != (p,) or upper.shape != (p,):
        raise DimensionMismatchError(f"rectangle limits must have length {p}")
    if np.any(np.isnan(lower)) or np.any(np.isnan(upper)) or np.any(lower > upper):
        raise ValueError(f"invalid rectangle: lower={lower}, upper={upper}")
    if np.any(lower == upper):
        return 0.0
    if p > 2:
        raise UnsupportedDimensionError(f"rectangle probabilities need p <= 2, got p = {p}")

    sd = np.sqrt(np.diag(moments.cov))
    a = (lower - moments.mean) / sd
    b = (upper - moments.mean) / sd
    if p == 1:
        # Integrate on the side of the mean away from the tail to keep precision
        if a[0] > 0.0:
            prob = ndtr(-a[0]) - ndtr(-b[0])
        else:
            prob = ndtr(b[0]) - ndtr(a[0])
        return float(min(1.0, max(0.0, prob)))

    r = float(moments.cov[0, 1] / (sd[0] * sd[1]))
    return bivariate_rectangle(a, b, min(1.0, max(-1.0, r)))


# ==================== INVERSE WISHART ====================

def sample_inverse_wishart(nu: float, scale: ArrayLike, rng: RngStream) -> NDArray[np.float64]:
    """
    Draw A ~ IW(nu, scale), density proportional to |A|^-(nu+p+1)/2 exp(-tr(scale A^-1)/2).

    Bartlett: with T lower triangular (T_ii^2 ~ chi2(nu - i), T_ij ~ N(0, 1)
    below the diagonal) and scale = C C^T, W = C^-T T T^T C^-1 is
    Wishart(nu, scale^-1), so A = W^-1 = U^T U with U = T^-1 C^T.

    Args:
        nu: Degrees of freedom, nu > p - 1
        scale: p x p SPD scale matrix
        rng: Random stream

    Returns:
        p x p SPD draw
    """
    scale = as_matrix(scale, "scale")
    p = scale.shape[0]
    if not nu > p - 1:
        raise ValueError(f"inverse Wishart needs nu > p - 1 = {p - 1}, got {nu}")
    chol = cholesky_factor(scale, "inverse Wishart scale")

    T = np.zeros((p, p))
    T[np.diag_indices(p)] = np.sqrt(rng.chisquare(nu - np.arange(p)))
    below = np.tril_indices(p, -1)
    if below[0].size:
        T[below] = rng.standard_normal(below[0].size)

    U = linalg.solve_triangular(T, chol.T, lower=True, check_finite=False)
    draw = U.T @ U
    return 0.5 * (draw + draw.T)


def log_inverse_wishart_density(A: ArrayLike, nu: float, scale: ArrayLike) -> float:
    """
    Normalized log density of IW(nu, scale) at A.

        (nu/2) log|scale| - (nu p / 2) log 2 - log Gamma_p(nu/2)
        - ((nu + p + 1)/2) log|A| - tr(scale A^-1)/2

    Args:
        A: p x p SPD evaluation point
        nu: Degrees of freedom, nu > p - 1
        scale: p x p SPD scale matrix

    Returns:
        Log density
    """
    A = as_matrix(A, "A")
    scale = as_matrix(scale, "scale")
    if A.shape != scale.shape:
        raise DimensionMismatchError(f"A has shape {A.shape} but scale has shape {scale.shape}")
    p = A.shape[0]
    if not nu > p - 1:
        raise ValueError(f"inverse Wishart needs nu > p - 1 = {p - 1}, got {nu}")

    chol_A = cholesky_factor(A, "A")
    chol_scale = cholesky_factor(scale, "inverse Wishart scale")
    # tr(scale A^-1) = ||L_A^-1 C_scale||_F^2
    M = linalg.solve_triangular(chol_A, chol_scale, lower=True, check_finite=False)
    trace_term = float(np.sum(M * M))

    return (
        0.5 * nu * logdet_from_cholesky(chol_scale)
        - 0.5 * nu * p * LOG_2
        - float(multigammaln(0.5 * nu, p))
        - 0.5 * (nu + p + 1) * logdet_from_cholesky(chol_A)
        - 0.5 * trace_term
    )


def inverse_wishart_mean(nu: float, scale: ArrayLike) -> NDArray[np.float64]:
    """E[A] = scale / (nu - p - 1), defined for nu > p + 1."""
    scale = as_spd(scale, "scale")
    p = scale.shape[0]
    if not nu > p + 1:
        raise ValueError(f"inverse Wishart mean needs nu > p + 1 = {p + 1}, got {nu}")
    return scale / (nu - p - 1)
