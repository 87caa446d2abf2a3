"""
Coverage Estimators
===================
Interval coverage indicators, Rao-Blackwellized (RB) coverage terms, and the
per-group and overall estimates with their variance estimates.

The RB term of group j replaces the indicator 1{theta_j in interval} with its
conditional expectation given the data and the generative values, i.e. the
conditional posterior probability of the interval rectangle.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from coverage.generative import GenerativeConfig
from model.errors import DimensionMismatchError
from model.normal_normal import theta_moments_batch
from model.types import GaussianMoments, GroupObservation
from stochastics.distributions import mvn_rectangle_prob


def coverage_indicator(theta_true: ArrayLike, intervals: Sequence[Tuple[float, float]]) -> int:
    """
    1 when every component lies strictly inside its interval, else 0.

    Args:
        theta_true: Length-p true effect
        intervals: p pairs (low, upp)

    Returns:
        0 or 1
    """
    theta = np.atleast_1d(np.asarray(theta_true, dtype=float))
    bounds = np.asarray(intervals, dtype=float).reshape(-1, 2)
    if bounds.shape[0] != theta.size:
        raise DimensionMismatchError(f"{bounds.shape[0]} intervals for a length-{theta.size} effect")
    return int(np.all((bounds[:, 0] < theta) & (theta < bounds[:, 1])))


def coverage_indicators(
    thetas_true: NDArray[np.float64],
    low: NDArray[np.float64],
    upp: NDArray[np.float64],
) -> NDArray[np.int64]:
    """Vector form of coverage_indicator over k groups (k x p inputs)."""
    return np.all((low < thetas_true) & (thetas_true < upp), axis=1).astype(np.int64)


def rb_coverage_terms(
    obs: GroupObservation,
    gen: GenerativeConfig,
    intervals: Sequence[Tuple[float, float]],
) -> float:
    """
    P(theta_j in the interval rectangle | A_gen, beta_gen, y_j).

    The true theta_j does not enter; only the realized data and intervals do.

    Args:
        obs: Mock observation of group j
        gen: Generative values
        intervals: p pairs (low, upp) from the fitted chain

    Returns:
        Probability in [0, 1]
    """
    bounds = np.asarray(intervals, dtype=float).reshape(-1, 2)
    low, upp = bounds[:, 0], bounds[:, 1]
    prior_mean = obs.regression_mean(gen.beta_gen)
    if gen.is_degenerate:
        # theta_j = X_j^T beta_gen with certainty
        return float(np.all((low < prior_mean) & (prior_mean < upp)))
    means, covs = theta_moments_batch(
        obs.y[None, :], obs.V[None, :, :], gen.A_gen, prior_mean[None, :]
    )
    return mvn_rectangle_prob(GaussianMoments(mean=means[0], cov=covs[0]), low, upp)


def rb_coverage_terms_batch(
    mock,
    gen: GenerativeConfig,
    low: NDArray[np.float64],
    upp: NDArray[np.float64],
) -> NDArray[np.float64]:
    """RB terms for all k groups of a mock dataset (k x p interval bounds)."""
    prior_means = mock.regression_means(gen.beta_gen)
    if gen.is_degenerate:
        return np.all((low < prior_means) & (prior_means < upp), axis=1).astype(float)
    means, covs = theta_moments_batch(mock.Y, mock.V, gen.A_gen, prior_means)
    return np.array([
        mvn_rectangle_prob(GaussianMoments(mean=means[j], cov=covs[j]), low[j], upp[j])
        for j in range(mock.k)
    ])


# ==================== AGGREGATION ====================

@dataclass(frozen=True)
class CoverageEstimate:
    """Per-group estimates and variances plus their overall aggregate"""

    per_group: NDArray[np.float64]
    per_group_var: NDArray[np.float64]
    overall: float
    overall_var: float


def overall_estimate(per_group: ArrayLike, per_group_var: ArrayLike) -> Tuple[float, float]:
    """
    Mean of the k group estimates; its variance is the mean of the group
    variances divided by k.
    """
    per_group = np.asarray(per_group, dtype=float)
    per_group_var = np.asarray(per_group_var, dtype=float)
    k = per_group.size
    return float(per_group.mean()), float(per_group_var.mean() / k)


def rb_estimate(terms: ArrayLike) -> CoverageEstimate:
    """
    Aggregate an n_sim x k matrix of RB terms.

    Per-group variance is sum_i (term_i - mean)^2 / (n (n - 1)).

    Args:
        terms: RB terms, one row per simulation

    Returns:
        CoverageEstimate
    """
    terms = np.asarray(terms, dtype=float)
    n = terms.shape[0]
    if n < 2:
        raise ValueError(f"variance estimates need at least 2 simulations, got {n}")
    per_group = terms.mean(axis=0)
    per_group_var = ((terms - per_group) ** 2).sum(axis=0) / (n * (n - 1))
    overall, overall_var = overall_estimate(per_group, per_group_var)
    return CoverageEstimate(per_group, per_group_var, overall, overall_var)


def naive_estimate(indicators: ArrayLike) -> CoverageEstimate:
    """
    Aggregate an n_sim x k matrix of coverage indicators; per-group variance
    is p_hat (1 - p_hat) / (n - 1).
    """
    indicators = np.asarray(indicators, dtype=float)
    n = indicators.shape[0]
    if n < 2:
        raise ValueError(f"variance estimates need at least 2 simulations, got {n}")
    per_group = indicators.mean(axis=0)
    per_group_var = per_group * (1.0 - per_group) / (n - 1)
    overall, overall_var = overall_estimate(per_group, per_group_var)
    return CoverageEstimate(per_group, per_group_var, overall, overall_var)
