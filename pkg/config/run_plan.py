"""
Run Plans
=========
Turns a validated RunConfig into the objects the library runs on: the
dataset, PriorSpecs, SamplerConfig, generative grid and beta_gen.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from numpy.typing import NDArray

from config.run_config import RunConfig
from coverage.generative import (
    GenerativeConfig,
    bivariate_generative_grid,
    univariate_generative_grid,
)
from datasets.builtin import BuiltinDataset, get_builtin, is_builtin
from datasets.loader import load_dataset
from model.errors import ConfigError
from model.types import Dataset
from priors.usp import PriorSpec, build_prior, parse_prior_token, v0_arithmetic_mean, v0_harmonic_mean
from sampler.chain import find_beta_gen
from sampler.config import SamplerConfig
from utils.logging_config import get_logger

logger = get_logger(__name__)

REFERENCE_RULES = {"harmonic": v0_harmonic_mean, "arithmetic": v0_arithmetic_mean}


@dataclass
class RunPlan:
    """Resolved inputs of one run"""

    run_config: RunConfig
    dataset: Dataset
    priors: List[PriorSpec]
    sampler: SamplerConfig
    builtin: Optional[BuiltinDataset] = None
    beta_gen: Optional[NDArray[np.float64]] = None
    beta_gen_source: Dict[str, Any] = field(default_factory=dict)
    grid: List[GenerativeConfig] = field(default_factory=list)


def resolve_dataset(name: str):
    """(Dataset, BuiltinDataset or None)."""
    if is_builtin(name):
        builtin = get_builtin(name)
        return builtin.dataset, builtin
    return load_dataset(name), None


def resolve_priors(entries, dataset: Dataset) -> List[PriorSpec]:
    priors = []
    for entry in entries:
        if isinstance(entry, str):
            entry = parse_prior_token(entry)
        priors.append(build_prior(entry, dataset))
    return priors


def resolve_beta_gen(run_config: RunConfig, dataset: Dataset, priors: List[PriorSpec], sampler: SamplerConfig):
    """
    beta_gen as given, or from a long fit when it is 'fit' or missing.

    Returns:
        (beta_gen, provenance dict)
    """
    mp = dataset.m * dataset.p
    if isinstance(run_config.beta_gen, list):
        beta = np.asarray(run_config.beta_gen, dtype=float)
        if beta.size != mp:
            raise ConfigError(f"beta_gen has length {beta.size}, expected m*p = {mp}")
        return beta, {'source': 'config'}

    fit = run_config.beta_gen_fit or {}
    prior_index = fit.get('prior', 0)
    if prior_index >= len(priors):
        raise ConfigError(f"beta_gen_fit prior index {prior_index} out of range")
    seed = fit.get('seed', run_config.master_seed)
    draws = fit.get('draws', sampler.n_keep)
    beta = find_beta_gen(dataset, priors[prior_index], sampler, seed=seed, draws=draws)
    return beta, {
        'source': 'fit',
        'prior': priors[prior_index].description,
        'seed': int(seed),
        'draws': int(draws),
    }


def build_grid(
    grid_spec: Dict[str, Any],
    dataset: Dataset,
    builtin: Optional[BuiltinDataset],
    beta_gen: NDArray[np.float64],
    n_sim: int,
) -> List[GenerativeConfig]:
    """
    Generative grid from its run-config form.

    Args:
        grid_spec: {"rule": "univariate-b0" | "bivariate-u" | "explicit", ...}
        dataset: Template dataset
        builtin: Builtin record (supplies Sigma for the hospital data)
        beta_gen: Generative regression coefficients
        n_sim: Simulations per grid point

    Returns:
        List of GenerativeConfig
    """
    rule = grid_spec['rule']
    if rule == 'univariate-b0':
        if dataset.p != 1:
            raise ConfigError(f"univariate-b0 grid needs p = 1, got p = {dataset.p}")
        V0 = REFERENCE_RULES[grid_spec.get('reference_rule', 'harmonic')](dataset)
        return univariate_generative_grid(V0, grid_spec['values'], beta_gen, n_sim)

    if rule == 'bivariate-u':
        if 'Sigma' in grid_spec:
            sigma = np.asarray(grid_spec['Sigma'], dtype=float)
        elif builtin is not None and 'Sigma' in builtin.aux:
            sigma = builtin.aux['Sigma']
        else:
            raise ConfigError("bivariate-u grid needs a Sigma matrix for this dataset")
        reference_name = grid_spec.get('reference', 'Sigma')
        reference = sigma if reference_name == 'Sigma' else REFERENCE_RULES[reference_name](dataset)
        return bivariate_generative_grid(sigma, grid_spec['values'], beta_gen, n_sim, reference=reference)

    grid = []
    for i, point in enumerate(grid_spec['points'], start=1):
        grid.append(GenerativeConfig(
            A_gen=point['A_gen'],
            beta_gen=beta_gen,
            n_sim=n_sim,
            label=point.get('label', f"point {i}"),
        ))
    return grid


def build_run_plan(run_config: RunConfig) -> RunPlan:
    """
    Resolve everything a RunConfig names.

    Args:
        run_config: Validated configuration

    Returns:
        RunPlan; grid and beta_gen are filled for coverage modes only
    """
    dataset, builtin = resolve_dataset(run_config.dataset)
    priors = resolve_priors(run_config.priors, dataset)
    sampler = SamplerConfig.from_dict(run_config.sampler)
    plan = RunPlan(
        run_config=run_config,
        dataset=dataset,
        priors=priors,
        sampler=sampler,
        builtin=builtin,
    )
    if run_config.mode == 'fit':
        return plan

    if run_config.grid is None:
        raise ConfigError(f"mode '{run_config.mode}' needs a generative grid")
    plan.beta_gen, plan.beta_gen_source = resolve_beta_gen(run_config, dataset, priors, sampler)
    plan.grid = build_grid(run_config.grid, dataset, builtin, plan.beta_gen, run_config.n_sim)
    logger.info(
        f"Run plan: {dataset.label}, {len(priors)} priors x {len(plan.grid)} grid points, "
        f"beta_gen {np.round(plan.beta_gen, 4).tolist()} ({plan.beta_gen_source['source']})"
    )
    return plan
