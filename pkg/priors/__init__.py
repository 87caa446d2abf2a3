# Priors package: USP and flat priors on the second-level covariance
from .usp import (
    PriorSpec,
    build_prior,
    flat_prior,
    parse_prior_token,
    usp_prior,
    v0_arithmetic_mean,
    v0_harmonic_mean,
    v0_scaled_diag,
)

__all__ = [
    'PriorSpec', 'build_prior', 'flat_prior', 'parse_prior_token', 'usp_prior',
    'v0_arithmetic_mean', 'v0_harmonic_mean', 'v0_scaled_diag',
]
