# Sampler package: MH-within-Gibbs chain for the USP hierarchical model
from .config import SamplerConfig
from .updates import (
    gibbs_update_A_flat_exact,
    gibbs_update_beta,
    gibbs_update_theta,
    mh_update_A_multivariate,
    mh_update_A_univariate,
)
from .chain import PosteriorSamples, find_beta_gen, posterior_interval, run_chain

__all__ = [
    'SamplerConfig',
    'gibbs_update_A_flat_exact', 'gibbs_update_beta', 'gibbs_update_theta',
    'mh_update_A_multivariate', 'mh_update_A_univariate',
    'PosteriorSamples', 'find_beta_gen', 'posterior_interval', 'run_chain',
]
