"""
Pytest configuration and shared fixtures
"""
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path for imports
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))


@pytest.fixture
def eight_schools_dataset():
    """SAT coaching data (k=8, p=1, m=1)"""
    from datasets.builtin import get_builtin
    return get_builtin('eight-schools').dataset


@pytest.fixture
def hospital_builtin():
    """Hospital profiling data with its Sigma and case counts"""
    from datasets.builtin import get_builtin
    return get_builtin('hospital-27')


@pytest.fixture
def hospital_dataset(hospital_builtin):
    """Hospital profiling data (k=27, p=2, m=2)"""
    return hospital_builtin.dataset


@pytest.fixture
def small_univariate_dataset():
    """Six groups, unequal variances, intercept-only design"""
    from model.types import Dataset, GroupObservation
    ys = [4.0, -2.0, 7.5, 1.0, 3.0, 10.0]
    vs = [4.0, 9.0, 16.0, 4.0, 25.0, 9.0]
    groups = [GroupObservation(y=[y], V=[[v]], x=[1.0]) for y, v in zip(ys, vs)]
    return Dataset(groups=groups, label='small-univariate')


@pytest.fixture
def small_bivariate_dataset():
    """Eight groups, p=2, one covariate plus intercept"""
    from model.types import Dataset, GroupObservation
    rng = np.random.default_rng(11)
    base = np.array([[2.0, 0.6], [0.6, 1.5]])
    groups = []
    for j in range(8):
        x2 = 0.1 * j
        theta = np.array([1.0 + 2.0 * x2, -1.0 + x2]) + rng.standard_normal(2)
        V = base * (1.0 + 0.25 * j)
        y = theta + np.linalg.cholesky(V) @ rng.standard_normal(2)
        groups.append(GroupObservation(y=y, V=V, x=[1.0, x2]))
    return Dataset(groups=groups, label='small-bivariate')


@pytest.fixture
def short_chain_config():
    """A few hundred iterations; enough for shape and determinism checks"""
    from sampler.config import SamplerConfig
    return SamplerConfig(total_iterations=600, burn_in=100, thin=1)


@pytest.fixture
def tiny_chain_config():
    """Shortest chain that still yields ESS estimates (50 retained draws)"""
    from sampler.config import SamplerConfig
    return SamplerConfig(total_iterations=120, burn_in=20, thin=2)


@pytest.fixture
def seed():
    """Master seed shared by determinism tests"""
    return 20240517
