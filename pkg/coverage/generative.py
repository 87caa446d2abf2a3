"""
Generative Grids and Mock Data
==============================
Fixed "true" hyperparameters (A_gen, beta_gen) for the repeated-sampling
study, grids of them indexed by reference shrinkage, and simulation of mock
datasets that reuse a template's V_j and x_j.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from model.errors import ConfigError, DimensionMismatchError
from model.linalg import as_matrix, as_spd
from model.normal_normal import A_to_b0_univariate, b0_to_A_univariate, shrinkage_determinant
from model.types import Dataset
from stochastics.rng import RngStream

DEFAULT_N_SIM = 1000


@dataclass(frozen=True, eq=False)
class GenerativeConfig:
    """
    One grid point of a coverage study.

    A_gen is SPD, or exactly zero for the full-shrinkage boundary (B0 = 1)
    where every theta_j equals X_j^T beta_gen. b0 is the reference shrinkage
    label (B0 for p = 1, |B0| for p >= 2).
    """

    A_gen: NDArray[np.float64] = field(repr=False)
    beta_gen: NDArray[np.float64] = field(repr=False)
    n_sim: int = DEFAULT_N_SIM
    label: str = ""
    b0: Optional[float] = None

    def __post_init__(self):
        A = as_matrix(self.A_gen, "A_gen")
        if not np.all(A == 0.0):
            A = as_spd(A, label="A_gen")
        object.__setattr__(self, "A_gen", A)
        object.__setattr__(self, "beta_gen", np.atleast_1d(np.asarray(self.beta_gen, dtype=float)))
        if self.n_sim < 1:
            raise ConfigError(f"n_sim must be positive, got {self.n_sim}")

    @property
    def p(self) -> int:
        return self.A_gen.shape[0]

    @property
    def is_degenerate(self) -> bool:
        """True at the A_gen = 0 boundary."""
        return bool(np.all(self.A_gen == 0.0))

    def check_template(self, template: Dataset):
        if self.p != template.p:
            raise DimensionMismatchError(f"A_gen is {self.p}x{self.p} but the template has p = {template.p}")
        if self.beta_gen.size != template.p * template.m:
            raise DimensionMismatchError(
                f"beta_gen has length {self.beta_gen.size}, expected m*p = {template.p * template.m}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "b0": self.b0,
            "A_gen": self.A_gen.tolist(),
            "beta_gen": self.beta_gen.tolist(),
            "n_sim": self.n_sim,
        }


def generate_mock_dataset(
    template: Dataset,
    gen: GenerativeConfig,
    rng: RngStream,
) -> Tuple[NDArray[np.float64], Dataset]:
    """
    theta_j ~ N_p(X_j^T beta_gen, A_gen), then y_j ~ N_p(theta_j, V_j).

    Args:
        template: Dataset supplying V_j and x_j
        gen: Generative values
        rng: Random stream (2 k p normals: effects first, then noise)

    Returns:
        (k x p true effects, mock Dataset)
    """
    gen.check_template(template)
    k, p = template.k, template.p
    means = template.regression_means(gen.beta_gen)

    effect_noise = rng.standard_normal((k, p))
    if gen.is_degenerate:
        thetas = means.copy()
    else:
        thetas = means + effect_noise @ np.linalg.cholesky(gen.A_gen).T

    sampling_noise = rng.standard_normal((k, p))
    V_chol = np.linalg.cholesky(template.V)
    Y = thetas + (V_chol @ sampling_noise[..., None])[..., 0]
    return thetas, template.with_y(Y, label=f"{template.label} mock")


# ==================== GRIDS ====================

def format_b0_label(b0: float, p: int) -> str:
    return f"B0={b0:.2f}" if p == 1 else f"|B0|={b0:.2f}"


def univariate_generative_grid(
    V0: float,
    B0_list: Sequence[float],
    beta_gen: ArrayLike,
    n_sim: int = DEFAULT_N_SIM,
) -> List[GenerativeConfig]:
    """
    A_gen,i = (1 - B0_i) V0 / B0_i for every reference shrinkage B0_i.

    Args:
        V0: Reference variance (scalar or 1 x 1)
        B0_list: Shrinkage values in (0, 1]
        beta_gen: Generative regression coefficients
        n_sim: Simulations per grid point

    Returns:
        One GenerativeConfig per B0, in order
    """
    V0 = float(as_matrix(V0, "V0")[0, 0])
    grid = []
    for B0 in B0_list:
        A = b0_to_A_univariate(float(B0), V0)
        grid.append(GenerativeConfig(
            A_gen=[[A]],
            beta_gen=beta_gen,
            n_sim=n_sim,
            label=format_b0_label(float(B0), 1),
            b0=A_to_b0_univariate(A, V0),
        ))
    return grid


def bivariate_generative_grid(
    Sigma: ArrayLike,
    u_list: Sequence[float],
    beta_gen: ArrayLike,
    n_sim: int = DEFAULT_N_SIM,
    reference: Optional[ArrayLike] = None,
) -> List[GenerativeConfig]:
    """
    A_gen,i = Sigma / u_i, labelled by |R (R + A_gen,i)^-1|.

    Args:
        Sigma: p x p SPD base covariance
        u_list: Positive divisors
        beta_gen: Generative regression coefficients
        n_sim: Simulations per grid point
        reference: Label reference R (Sigma when None)

    Returns:
        One GenerativeConfig per u, in order
    """
    Sigma = as_spd(Sigma, label="Sigma")
    reference = Sigma if reference is None else as_spd(reference, label="reference")
    grid = []
    for u in u_list:
        if not u > 0.0:
            raise ValueError(f"u must be positive, got {u}")
        A = Sigma / float(u)
        b0 = shrinkage_determinant(reference, A)
        grid.append(GenerativeConfig(
            A_gen=A,
            beta_gen=beta_gen,
            n_sim=n_sim,
            label=format_b0_label(b0, Sigma.shape[0]),
            b0=b0,
        ))
    return grid
