"""
MH-within-Gibbs Chain
=====================
Runs the theta -> beta -> A sweep, keeps thinned post-burn-in draws, and
reports acceptance and effective sample sizes.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from tqdm import tqdm

from model.errors import ChainNumericError, ConfigError, NotPositiveDefiniteError
from model.linalg import as_spd, cholesky_solve
from model.normal_normal import design_gram_factor, require_propriety
from model.types import HyperState
from priors.usp import PriorSpec, v0_harmonic_mean
from sampler.config import (
    A_UPDATE_AUTO,
    A_UPDATE_EXACT_FLAT,
    A_UPDATE_INVERSE_WISHART,
    A_UPDATE_LOG_NORMAL,
    SamplerConfig,
)
from sampler.updates import (
    gibbs_update_A_flat_exact,
    gibbs_update_beta,
    gibbs_update_theta,
    mh_update_A_multivariate,
    mh_update_A_univariate,
)
from stochastics.diagnostics import ChainLike, effective_sample_sizes, empirical_quantile
from stochastics.rng import RngStream, as_stream
from utils.logging_config import get_logger

logger = get_logger(__name__)


# ==================== RESULTS ====================

@dataclass(eq=False)
class PosteriorSamples:
    """
    Retained draws of one chain.

    Shapes (n = retained draws):
        thetas      n x k x p
        A_draws     n x p x p
        beta_draws  n x mp
    """

    thetas: NDArray[np.float64] = field(repr=False)
    A_draws: NDArray[np.float64] = field(repr=False)
    beta_draws: NDArray[np.float64] = field(repr=False)
    acceptance_rate: float
    ess_per_parameter: Dict[str, float] = field(default_factory=dict, repr=False)
    prior_label: str = ""
    config: Optional[SamplerConfig] = field(default=None, repr=False)

    @property
    def n_draws(self) -> int:
        return self.thetas.shape[0]

    @property
    def k(self) -> int:
        return self.thetas.shape[1]

    @property
    def p(self) -> int:
        return self.thetas.shape[2]

    def intervals(self, level: float = 0.95) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Equal-tailed intervals for every theta component, as (low, upp) k x p arrays."""
        check_level(level)
        tail = 0.5 * (1.0 - level)
        low, upp = np.quantile(self.thetas, [tail, 1.0 - tail], axis=0, method="linear")
        return low, upp

    def theta_ess(self) -> NDArray[np.float64]:
        return np.array([v for key, v in self.ess_per_parameter.items() if key.startswith("theta_")])

    def mean_theta_ess(self) -> float:
        values = self.theta_ess()
        values = values[np.isfinite(values)]
        return float(values.mean()) if values.size else float("nan")

    def posterior_mean_A(self) -> NDArray[np.float64]:
        return self.A_draws.mean(axis=0)

    def posterior_mean_beta(self) -> NDArray[np.float64]:
        return self.beta_draws.mean(axis=0)

    def summary(self, level: float = 0.95) -> pd.DataFrame:
        """
        One row per theta component: posterior mean, sd, interval and ESS.

        Args:
            level: Interval level

        Returns:
            DataFrame indexed by (group, component), both 1-based
        """
        low, upp = self.intervals(level)
        rows = []
        for j in range(self.k):
            for l in range(self.p):
                draws = self.thetas[:, j, l]
                rows.append({
                    'group': j + 1,
                    'component': l + 1,
                    'mean': float(draws.mean()),
                    'sd': float(draws.std(ddof=1)) if draws.size > 1 else 0.0,
                    'low': float(low[j, l]),
                    'upp': float(upp[j, l]),
                    'ess': self.ess_per_parameter.get(theta_label(j, l), float("nan")),
                })
        return pd.DataFrame(rows).set_index(['group', 'component'])


def theta_label(j: int, l: int) -> str:
    return f"theta_{j + 1}_{l + 1}"


def parameter_labels(k: int, p: int, m: int) -> List[str]:
    """Labels matching the flattened (theta, A lower triangle, beta) ESS columns."""
    labels = [theta_label(j, l) for j in range(k) for l in range(p)]
    labels += [f"A_{a + 1}_{b + 1}" for a, b in zip(*np.tril_indices(p))]
    labels += [f"beta_{l + 1}_{c + 1}" for l in range(p) for c in range(m)]
    return labels


def check_level(level: float):
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")


def posterior_interval(samples: ChainLike, level: float = 0.95) -> Tuple[float, float]:
    """
    Equal-tailed interval from the (1-level)/2 and 1-(1-level)/2 quantiles.

    Args:
        samples: Chain or array of draws
        level: Nominal level in (0, 1)

    Returns:
        (low, upp) with low <= upp
    """
    check_level(level)
    tail = 0.5 * (1.0 - level)
    return empirical_quantile(samples, tail), empirical_quantile(samples, 1.0 - tail)


# ==================== INITIALIZATION ====================

def pooled_mean_beta(dataset) -> NDArray[np.float64]:
    """
    Per-component least squares fit of y_j on x_j; the plain mean of the y_j
    for an intercept-only design.
    """
    X = dataset.X
    gram_chol = design_gram_factor(X)
    coefficients = cholesky_solve(gram_chol, X.T @ dataset.Y)
    # m x p -> component-major
    return coefficients.T.reshape(dataset.p * dataset.m)


def initial_state(dataset, prior: PriorSpec, config: SamplerConfig):
    """(theta0, beta0, A0) per the configured initialization rules."""
    k, p, m = dataset.k, dataset.p, dataset.m

    if config.init_theta == "explicit":
        thetas = np.asarray(config.theta0, dtype=float).reshape(k, p)
    else:
        thetas = dataset.Y.copy()

    if config.init_beta == "pooled-mean":
        beta = pooled_mean_beta(dataset)
    else:
        if config.beta0 is None:
            raise ConfigError(f"init_beta '{config.init_beta}' needs beta0")
        beta = np.asarray(config.beta0, dtype=float).ravel()
        if beta.size != m * p:
            raise ConfigError(f"beta0 has length {beta.size}, expected m*p = {m * p}")

    if config.init_A == "explicit":
        A = as_spd(config.A0, label="A0")
    elif prior.is_flat:
        A = v0_harmonic_mean(dataset)
    else:
        A = prior.base
    if A.shape[0] != p:
        raise ConfigError(f"initial A is {A.shape[0]}x{A.shape[0]}, expected p = {p}")
    return thetas, beta, A.copy()


def resolve_a_update(config: SamplerConfig, prior: PriorSpec, p: int) -> str:
    strategy = config.a_update
    if strategy == A_UPDATE_AUTO:
        strategy = A_UPDATE_LOG_NORMAL if p == 1 else A_UPDATE_INVERSE_WISHART
    if strategy == A_UPDATE_LOG_NORMAL and p != 1:
        raise ConfigError(f"log-normal A update needs p = 1, got p = {p}")
    if strategy == A_UPDATE_EXACT_FLAT and not prior.is_flat:
        raise ConfigError("exact-flat A update needs the flat prior")
    if strategy == A_UPDATE_INVERSE_WISHART:
        config.check_nu(p)
    return strategy


# ==================== CHAIN ====================

def run_chain(
    dataset,
    prior: PriorSpec,
    config: SamplerConfig = None,
    rng: Any = None,
    progress: bool = False,
) -> PosteriorSamples:
    """
    Run one MH-within-Gibbs chain.

    Args:
        dataset: Observed Dataset
        prior: Prior on A
        config: SamplerConfig (defaults when None)
        rng: RngStream or integer seed
        progress: Show a progress bar

    Returns:
        PosteriorSamples with config.n_keep retained draws
    """
    config = config or SamplerConfig()
    rng = as_stream(rng)
    k, p, m = dataset.k, dataset.p, dataset.m
    require_propriety(k, p, m)
    design_gram_factor(dataset.X)
    if not prior.is_flat and prior.V0.shape[0] != p:
        raise ConfigError(f"prior V0 is {prior.V0.shape[0]}x{prior.V0.shape[0]}, p = {p}")
    strategy = resolve_a_update(config, prior, p)

    thetas, beta, A = initial_state(dataset, prior, config)
    n_keep = config.n_keep
    kept_thetas = np.empty((n_keep, k, p))
    kept_A = np.empty((n_keep, p, p))
    kept_beta = np.empty((n_keep, m * p))
    accepted = 0

    logger.info(
        f"Chain start: {dataset.label} k={k} p={p} m={m}, prior {prior.description}, "
        f"{config.total_iterations} iterations, A update {strategy}"
    )

    iterations = tqdm(
        range(1, config.total_iterations + 1),
        desc='MCMC sampling', mininterval=0.5, disable=not progress,
    )
    for i in iterations:
        try:
            thetas = gibbs_update_theta(dataset, HyperState(A=A, beta=beta), rng)
            if not config.hold_hyperparameters:
                beta = gibbs_update_beta(dataset, thetas, A, rng)
                if strategy == A_UPDATE_LOG_NORMAL:
                    a_value, ok = mh_update_A_univariate(
                        float(A[0, 0]), dataset, thetas, beta, prior, config.proposal_sigma, rng
                    )
                    A = np.array([[a_value]])
                elif strategy == A_UPDATE_INVERSE_WISHART:
                    A, ok = mh_update_A_multivariate(
                        A, dataset, thetas, beta, prior, config.proposal_nu, rng
                    )
                else:
                    A, ok = gibbs_update_A_flat_exact(dataset, thetas, beta, rng), True
                accepted += int(ok)
        except (NotPositiveDefiniteError, np.linalg.LinAlgError, FloatingPointError) as e:
            raise ChainNumericError(i, e) from e

        if i > config.burn_in and (i - config.burn_in) % config.thin == 0:
            slot = (i - config.burn_in) // config.thin - 1
            kept_thetas[slot] = thetas
            kept_A[slot] = A
            kept_beta[slot] = beta

    acceptance_rate = accepted / config.total_iterations
    rows, cols = np.tril_indices(p)
    flat_draws = np.concatenate(
        [
            kept_thetas.reshape(n_keep, k * p),
            kept_A[:, rows, cols],
            kept_beta,
        ],
        axis=1,
    )
    ess = dict(zip(parameter_labels(k, p, m), effective_sample_sizes(flat_draws).tolist()))

    samples = PosteriorSamples(
        thetas=kept_thetas,
        A_draws=kept_A,
        beta_draws=kept_beta,
        acceptance_rate=acceptance_rate,
        ess_per_parameter=ess,
        prior_label=prior.description,
        config=config,
    )
    logger.info(
        f"Chain done: acceptance rate {acceptance_rate:.3f}, "
        f"mean theta ESS {samples.mean_theta_ess():.0f} of {n_keep} draws"
    )
    return samples


def find_beta_gen(
    dataset,
    prior: PriorSpec,
    config: SamplerConfig = None,
    seed: int = 0,
    draws: Optional[int] = None,
) -> NDArray[np.float64]:
    """
    Posterior mean of beta from a long fit, used as the generative beta of a
    coverage experiment.

    Args:
        dataset: Observed Dataset
        prior: Prior used for the fit
        config: Base sampler settings (beta starts at the pooled mean)
        seed: Seed of the fit
        draws: Retained draws; config.n_keep when None

    Returns:
        Length mp vector
    """
    config = config or SamplerConfig()
    config = replace(config, init_beta="pooled-mean")
    if draws is not None:
        config = config.with_retained_draws(draws)
    samples = run_chain(dataset, prior, config, RngStream(seed))
    beta_gen = samples.posterior_mean_beta()
    logger.info(f"Generative beta from {config.n_keep} draws (seed {seed}): {np.round(beta_gen, 4).tolist()}")
    return beta_gen


def thin_indices(config: SamplerConfig) -> NDArray[np.int64]:
    """1-based iteration numbers of the retained draws."""
    return np.arange(config.burn_in + config.thin, config.total_iterations + 1, config.thin)

