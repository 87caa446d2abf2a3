# Model package: Normal-Normal hierarchical model types and algebra
from .types import Dataset, GaussianMoments, GroupObservation, HyperState
from .normal_normal import (
    A_to_b0_univariate,
    b0_to_A_univariate,
    conditional_beta_moments,
    conditional_theta_moments,
    log_conditional_A_density,
    log_usp_density,
    propriety_check,
    shrinkage_matrix,
)

__all__ = [
    'Dataset', 'GaussianMoments', 'GroupObservation', 'HyperState',
    'A_to_b0_univariate', 'b0_to_A_univariate', 'conditional_beta_moments',
    'conditional_theta_moments', 'log_conditional_A_density', 'log_usp_density',
    'propriety_check', 'shrinkage_matrix',
]
