"""
Sampler Configuration
=====================
Chain length, burn-in, thinning, proposal tuning, initialization rules and
the A-update strategy for the MH-within-Gibbs sampler.
"""

from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, Optional

import numpy as np

from model.errors import ConfigError

# Initialization rules
INIT_THETA_RULES = ("data", "explicit")
INIT_BETA_RULES = ("pooled-mean", "generative", "explicit")
INIT_A_RULES = ("V0-based", "explicit")

# A-update strategies
A_UPDATE_AUTO = "auto"
A_UPDATE_LOG_NORMAL = "log-normal"
A_UPDATE_INVERSE_WISHART = "inverse-wishart"
A_UPDATE_EXACT_FLAT = "exact-flat"
A_UPDATES = (A_UPDATE_AUTO, A_UPDATE_LOG_NORMAL, A_UPDATE_INVERSE_WISHART, A_UPDATE_EXACT_FLAT)


@dataclass(frozen=True)
class SamplerConfig:
    """
    Settings for one chain.

    Iterations are numbered 1..total_iterations; iteration i is kept when
    i > burn_in and (i - burn_in) is a multiple of thin.
    """

    total_iterations: int = 42000
    burn_in: int = 2000
    thin: int = 2
    proposal_sigma: float = 2.0
    proposal_nu: float = 40.0
    init_theta: str = "data"
    init_beta: str = "pooled-mean"
    init_A: str = "V0-based"
    a_update: str = A_UPDATE_AUTO
    hold_hyperparameters: bool = False
    theta0: Optional[Any] = field(default=None, compare=False)
    beta0: Optional[Any] = field(default=None, compare=False)
    A0: Optional[Any] = field(default=None, compare=False)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.total_iterations < 1:
            raise ConfigError(f"total_iterations must be positive, got {self.total_iterations}")
        if self.burn_in < 0:
            raise ConfigError(f"burn_in must be nonnegative, got {self.burn_in}")
        if self.thin < 1:
            raise ConfigError(f"thin must be positive, got {self.thin}")
        if self.burn_in >= self.total_iterations:
            raise ConfigError(
                f"burn_in ({self.burn_in}) must be below total_iterations ({self.total_iterations})"
            )
        if (self.total_iterations - self.burn_in) % self.thin:
            raise ConfigError(
                f"total_iterations - burn_in = {self.total_iterations - self.burn_in} "
                f"is not divisible by thin = {self.thin}"
            )
        if not self.proposal_sigma > 0.0:
            raise ConfigError(f"proposal_sigma must be positive, got {self.proposal_sigma}")
        if self.init_theta not in INIT_THETA_RULES:
            raise ConfigError(f"init_theta must be one of {INIT_THETA_RULES}")
        if self.init_beta not in INIT_BETA_RULES:
            raise ConfigError(f"init_beta must be one of {INIT_BETA_RULES}")
        if self.init_A not in INIT_A_RULES:
            raise ConfigError(f"init_A must be one of {INIT_A_RULES}")
        if self.a_update not in A_UPDATES:
            raise ConfigError(f"a_update must be one of {A_UPDATES}")
        if self.init_theta == "explicit" and self.theta0 is None:
            raise ConfigError("init_theta 'explicit' needs theta0")
        if self.init_beta == "explicit" and self.beta0 is None:
            raise ConfigError("init_beta 'explicit' needs beta0")
        if self.init_A == "explicit" and self.A0 is None:
            raise ConfigError("init_A 'explicit' needs A0")

    @property
    def n_keep(self) -> int:
        """Retained draws per parameter."""
        return (self.total_iterations - self.burn_in) // self.thin

    def check_nu(self, p: int):
        if not self.proposal_nu > p - 1:
            raise ConfigError(f"proposal_nu must exceed p - 1 = {p - 1}, got {self.proposal_nu}")

    def with_generative_beta(self, beta_gen) -> "SamplerConfig":
        """Start beta at beta_gen; used by coverage runs."""
        return replace(self, init_beta="generative", beta0=np.asarray(beta_gen, dtype=float).tolist())

    def with_retained_draws(self, draws: int) -> "SamplerConfig":
        """Same burn-in and thinning, long enough to keep `draws` draws."""
        return replace(self, total_iterations=self.burn_in + draws * self.thin)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for key in ("theta0", "beta0", "A0"):
            value = data[key]
            if value is None:
                data.pop(key)
            else:
                data[key] = np.asarray(value, dtype=float).tolist()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SamplerConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown sampler settings: {sorted(unknown)}")
        return cls(**data)
