# Stochastics package: random streams, distributions and chain diagnostics
from .rng import RngStream, derive_seed
from .distributions import (
    log_inverse_wishart_density,
    mvn_rectangle_prob,
    sample_inverse_wishart,
    sample_mvn,
    std_normal_cdf,
)
from .diagnostics import Chain, effective_sample_size, empirical_quantile

__all__ = [
    'RngStream', 'derive_seed',
    'log_inverse_wishart_density', 'mvn_rectangle_prob', 'sample_inverse_wishart',
    'sample_mvn', 'std_normal_cdf',
    'Chain', 'effective_sample_size', 'empirical_quantile',
]
