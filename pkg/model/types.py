"""
Model Data Types
================
Groups, datasets, hyperparameter states and Gaussian moment carriers for the
Normal-Normal hierarchical model.

Layout conventions:
    y_j     length p
    V_j     p x p, known sampling covariance
    x_j     length m, covariates (x_j[0] = 1.0 when an intercept is fit)
    beta    length m*p, component-major: beta[l*m:(l+1)*m] multiplies x_j for component l
    X_j     mp x p block diagonal = kron(I_p, x_j), so X_j^T beta = beta.reshape(p, m) @ x_j
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from model.errors import DatasetError, DimensionMismatchError
from model.linalg import SpdMatrix, as_spd


@dataclass(frozen=True, eq=False)
class GroupObservation:
    """One group's unbiased estimate, its known covariance, and its covariates"""

    y: NDArray[np.float64]
    V: SpdMatrix
    x: NDArray[np.float64]

    def __post_init__(self):
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        if y.ndim != 1 or x.ndim != 1:
            raise DimensionMismatchError("y and x must be vectors")
        if x.size < 1:
            raise DimensionMismatchError("x needs at least one covariate")
        V = as_spd(self.V, label="V")
        if V.shape[0] != y.size:
            raise DimensionMismatchError(
                f"V is {V.shape[0]}x{V.shape[0]} but y has length {y.size}"
            )
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "V", V)

    @property
    def p(self) -> int:
        return self.y.size

    @property
    def m(self) -> int:
        return self.x.size

    @property
    def design_matrix(self) -> NDArray[np.float64]:
        """X_j, the mp x p block diagonal matrix with x_j down the diagonal."""
        return np.kron(np.eye(self.p), self.x[:, None])

    def regression_mean(self, beta: ArrayLike) -> NDArray[np.float64]:
        """X_j^T beta."""
        beta = np.asarray(beta, dtype=float)
        if beta.size != self.p * self.m:
            raise DimensionMismatchError(
                f"beta has length {beta.size}, expected m*p = {self.p * self.m}"
            )
        return beta.reshape(self.p, self.m) @ self.x

    def with_y(self, y: ArrayLike) -> "GroupObservation":
        return GroupObservation(y=y, V=self.V, x=self.x)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordered groups sharing p and m"""

    groups: List[GroupObservation]
    label: str = "dataset"

    def __post_init__(self):
        groups = list(self.groups)
        if len(groups) < 2:
            raise DatasetError(f"need at least 2 groups, got {len(groups)}")
        p, m = groups[0].p, groups[0].m
        for j, group in enumerate(groups, start=1):
            if group.p != p or group.m != m:
                raise DatasetError(
                    f"group has (p, m) = ({group.p}, {group.m}), expected ({p}, {m})",
                    group=j,
                )
        object.__setattr__(self, "groups", groups)

    @property
    def k(self) -> int:
        return len(self.groups)

    @property
    def p(self) -> int:
        return self.groups[0].p

    @property
    def m(self) -> int:
        return self.groups[0].m

    # Stacked views used by the vectorized sampler
    @cached_property
    def Y(self) -> NDArray[np.float64]:
        return np.stack([g.y for g in self.groups])

    @cached_property
    def V(self) -> NDArray[np.float64]:
        return np.stack([g.V for g in self.groups])

    @cached_property
    def X(self) -> NDArray[np.float64]:
        return np.stack([g.x for g in self.groups])

    def regression_means(self, beta: ArrayLike) -> NDArray[np.float64]:
        """k x p matrix whose rows are X_j^T beta."""
        return regression_means(self.X, beta, self.p)

    def with_y(self, Y: ArrayLike, label: str = None) -> "Dataset":
        """Same V_j and x_j, new estimates."""
        Y = np.asarray(Y, dtype=float).reshape(self.k, self.p)
        return Dataset(
            groups=[g.with_y(y) for g, y in zip(self.groups, Y)],
            label=label or self.label,
        )

    def __len__(self) -> int:
        return self.k


@dataclass(frozen=True, eq=False)
class HyperState:
    """Second-level covariance A and regression coefficients beta"""

    A: SpdMatrix
    beta: NDArray[np.float64]

    def __post_init__(self):
        object.__setattr__(self, "A", as_spd(self.A, label="A"))
        object.__setattr__(self, "beta", np.atleast_1d(np.asarray(self.beta, dtype=float)))


@dataclass(frozen=True, eq=False)
class GaussianMoments:
    mean: NDArray[np.float64]
    cov: SpdMatrix = field(repr=False)

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = as_spd(self.cov, label="covariance")
        if cov.shape[0] != mean.size:
            raise DimensionMismatchError(
                f"mean has length {mean.size} but covariance is {cov.shape[0]}x{cov.shape[0]}"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


def regression_means(X: NDArray[np.float64], beta: ArrayLike, p: int) -> NDArray[np.float64]:
    beta = np.asarray(beta, dtype=float)
    m = X.shape[1]
    if beta.size != m * p:
        raise DimensionMismatchError(f"beta has length {beta.size}, expected m*p = {m * p}")
    return X @ beta.reshape(p, m).T


def as_groups(data) -> Sequence[GroupObservation]:
    """Accept a Dataset or a plain sequence of groups."""
    if isinstance(data, Dataset):
        return data.groups
    groups = list(data)
    if not groups:
        raise DatasetError("no groups given")
    return groups
