"""
Chain Diagnostics
=================
Quantiles and effective sample sizes for scalar MCMC output.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import fft

from model.errors import DegenerateChainError

MIN_ESS_LENGTH = 10
# Superefficient chains may exceed n, capped here
MAX_ESS_RATIO = 1.5


@dataclass(frozen=True, eq=False)
class Chain:
    """Ordered draws of one scalar functional"""

    values: NDArray[np.float64]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if values.size == 0:
            raise DegenerateChainError("chain is empty")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


ChainLike = Union[Chain, ArrayLike]


def _values(samples: ChainLike) -> NDArray[np.float64]:
    if isinstance(samples, Chain):
        return samples.values
    return Chain(samples).values


def empirical_quantile(samples: ChainLike, q: float) -> float:
    """
    Type-7 quantile: linear interpolation at h = (n - 1) q on the sorted draws.

    Args:
        samples: Chain or array of draws
        q: Probability in [0, 1]

    Returns:
        Interpolated quantile
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    return float(np.quantile(_values(samples), q, method="linear"))


def autocorrelation(x: NDArray[np.float64]) -> NDArray[np.float64]:
    """Biased sample autocorrelation at lags 0..n-1 via zero-padded FFT."""
    n = x.size
    centered = x - x.mean()
    size = fft.next_fast_len(2 * n)
    spectrum = fft.rfft(centered, size)
    acov = fft.irfft(spectrum * np.conj(spectrum), size)[:n] / n
    return acov / acov[0]


def effective_sample_size(samples: ChainLike) -> float:
    """
    n / tau with tau = -1 + 2 sum_t (rho_2t + rho_2t+1), summing pairs while
    they stay positive (Geyer's initial positive sequence).

    Args:
        samples: Chain of at least 10 draws

    Returns:
        ESS in (0, 1.5 n]
    """
    x = _values(samples)
    n = x.size
    if n < MIN_ESS_LENGTH:
        raise DegenerateChainError(f"ESS needs at least {MIN_ESS_LENGTH} draws, got {n}")
    if np.ptp(x) == 0.0 or not np.isfinite(x).all():
        raise DegenerateChainError("ESS of a constant or non-finite chain is undefined")

    rho = autocorrelation(x)
    pairs = n // 2
    gamma = rho[0:2 * pairs:2] + rho[1:2 * pairs:2]
    non_positive = np.flatnonzero(gamma <= 0.0)
    stop = non_positive[0] if non_positive.size else pairs
    tau = -1.0 + 2.0 * float(np.sum(gamma[:stop]))
    if tau <= 0.0:
        return MAX_ESS_RATIO * n
    return min(n / tau, MAX_ESS_RATIO * n)


def effective_sample_sizes(draws: NDArray[np.float64]) -> NDArray[np.float64]:
    """
    ESS of every column of an (n, d) draw matrix. Constant columns get NaN.
    """
    draws = np.asarray(draws, dtype=float)
    draws = draws.reshape(draws.shape[0], -1)
    out = np.full(draws.shape[1], np.nan)
    for col in range(draws.shape[1]):
        try:
            out[col] = effective_sample_size(draws[:, col])
        except DegenerateChainError:
            continue
    return out
