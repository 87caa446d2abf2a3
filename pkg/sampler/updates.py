"""
Gibbs and Metropolis-Hastings Steps
===================================
The single-parameter updates of the MH-within-Gibbs sweep:

    theta_j | A, beta, y   exact Gibbs draw
    beta | A, theta, y     exact Gibbs draw
    A | beta, theta, y     MH on log A (p = 1), inverse Wishart proposal MH
                           (any p), or an exact IW draw under the flat prior
"""

import math
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from model.errors import NotPositiveDefiniteError
from model.linalg import as_matrix
from model.normal_normal import (
    conditional_beta_moments,
    log_conditional_A_density,
    scatter_matrix,
    theta_moments_batch,
)
from model.types import HyperState
from priors.usp import PriorSpec
from stochastics.distributions import (
    log_inverse_wishart_density,
    sample_inverse_wishart,
    sample_mvn,
    sample_mvn_batch,
)
from stochastics.rng import RngStream
from utils.logging_config import get_logger

logger = get_logger(__name__)

MAX_PROPOSAL_RETRIES = 100


# ==================== GIBBS STEPS ====================

def gibbs_update_theta(dataset, state: HyperState, rng: RngStream) -> NDArray[np.float64]:
    """
    Draw every theta_j from its conditional posterior.

    Args:
        dataset: Observed Dataset
        state: Current (A, beta)
        rng: Random stream (consumes k*p normals)

    Returns:
        k x p array of draws, row j for group j
    """
    means, covs = theta_moments_batch(
        dataset.Y, dataset.V, state.A, dataset.regression_means(state.beta)
    )
    return sample_mvn_batch(means, covs, rng)


def gibbs_update_beta(dataset, thetas: ArrayLike, A: ArrayLike, rng: RngStream) -> NDArray[np.float64]:
    """One draw of beta from N_mp(mu_beta, Sigma_beta)."""
    return sample_mvn(conditional_beta_moments(dataset, thetas, A), rng)


# ==================== A UPDATES ====================

def accept_proposal(log_ratio: float, u: float) -> bool:
    """MH acceptance test u < exp(min(0, log_ratio)); safe for u == 0."""
    if math.isnan(log_ratio):
        return False
    return u < math.exp(min(0.0, log_ratio))


def mh_update_A_univariate(
    current_A: float,
    dataset,
    thetas: ArrayLike,
    beta: ArrayLike,
    prior: PriorSpec,
    sigma: float,
    rng: RngStream,
) -> Tuple[float, bool]:
    """
    Random walk on log A with a Gaussian step of scale sigma.

    The Hastings ratio carries the Jacobian A*/A of the log transform.
    Proposals that overflow or underflow are rejected.

    Args:
        current_A: Current variance (> 0)
        dataset: Observed Dataset (p = 1)
        thetas: k random effects
        beta: Regression coefficients
        prior: USP or flat prior
        sigma: Proposal scale on log A
        rng: Random stream (one normal, one uniform)

    Returns:
        (new A, accepted)
    """
    if not current_A > 0.0:
        raise ValueError(f"current A must be positive, got {current_A}")
    log_current = math.log(current_A)
    log_proposal = log_current + sigma * float(rng.standard_normal())
    u = float(rng.uniform())

    proposal = math.exp(log_proposal) if log_proposal < 700.0 else math.inf
    if not (0.0 < proposal < math.inf):
        return current_A, False

    try:
        log_ratio = (
            log_conditional_A_density(proposal, dataset, thetas, beta, prior)
            - log_conditional_A_density(current_A, dataset, thetas, beta, prior)
            + log_proposal
            - log_current
        )
    except NotPositiveDefiniteError:
        return current_A, False
    if accept_proposal(log_ratio, u):
        return proposal, True
    return current_A, False


def mh_log_ratio_multivariate(
    current_A: NDArray[np.float64],
    proposal: NDArray[np.float64],
    dataset,
    thetas: ArrayLike,
    beta: ArrayLike,
    prior: PriorSpec,
    nu: float,
) -> float:
    """
    log Hastings ratio for an IW(nu, (nu+p+1) A) proposal:

        log pi_c(A*) - log pi_c(A)
        + log IW(A | nu, (nu+p+1) A*) - log IW(A* | nu, (nu+p+1) A)
    """
    p = current_A.shape[0]
    c = nu + p + 1
    return (
        log_conditional_A_density(proposal, dataset, thetas, beta, prior)
        - log_conditional_A_density(current_A, dataset, thetas, beta, prior)
        + log_inverse_wishart_density(current_A, nu, c * proposal)
        - log_inverse_wishart_density(proposal, nu, c * current_A)
    )


def mh_update_A_multivariate(
    current_A: ArrayLike,
    dataset,
    thetas: ArrayLike,
    beta: ArrayLike,
    prior: PriorSpec,
    nu: float,
    rng: RngStream,
) -> Tuple[NDArray[np.float64], bool]:
    """
    MH step with an inverse Wishart proposal whose mode is the current A.

    A proposal that is not numerically SPD is redrawn, up to 100 times; after
    that the step rejects.

    Args:
        current_A: Current p x p SPD matrix
        dataset: Observed Dataset
        thetas: k x p random effects
        beta: Regression coefficients
        prior: USP or flat prior
        nu: Proposal degrees of freedom (> p - 1)
        rng: Random stream

    Returns:
        (new A, accepted)
    """
    current_A = as_matrix(current_A, "A")
    p = current_A.shape[0]
    scale = (nu + p + 1) * current_A

    for attempt in range(1, MAX_PROPOSAL_RETRIES + 1):
        proposal = sample_inverse_wishart(nu, scale, rng)
        try:
            log_ratio = mh_log_ratio_multivariate(
                current_A, proposal, dataset, thetas, beta, prior, nu
            )
        except NotPositiveDefiniteError as e:
            logger.debug(f"Proposal {attempt} rejected as not SPD: {e}")
            continue
        if accept_proposal(log_ratio, float(rng.uniform())):
            return proposal, True
        return current_A, False

    logger.warning(
        f"No SPD inverse Wishart proposal in {MAX_PROPOSAL_RETRIES} attempts; keeping current A"
    )
    return current_A, False


def gibbs_update_A_flat_exact(
    dataset,
    thetas: ArrayLike,
    beta: ArrayLike,
    rng: RngStream,
) -> NDArray[np.float64]:
    """
    Exact draw A ~ IW(k - p - 1, S) under the flat prior on A.

    Args:
        dataset: Observed Dataset
        thetas: k x p random effects
        beta: Regression coefficients
        rng: Random stream

    Returns:
        p x p SPD draw
    """
    S = scatter_matrix(dataset, thetas, beta)
    return sample_inverse_wishart(dataset.k - dataset.p - 1, S, rng)
