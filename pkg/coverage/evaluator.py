"""
Coverage Evaluation Driver
==========================
Runs the repeated-sampling study for one (prior, generative point) cell or a
whole prior x grid campaign.

Seeds:
    cell_seed    = derive_seed(master_seed, prior_index, grid_index)
    simulation i = RngStream(cell_seed, i), used for the mock data and then the chain

so every cell and every simulation can be rerun in isolation, and results do
not depend on the number of worker processes.
"""

from contextlib import nullcontext
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from tqdm import tqdm

from coverage.estimators import (
    coverage_indicators,
    naive_estimate,
    rb_coverage_terms_batch,
    rb_estimate,
)
from coverage.generative import GenerativeConfig, generate_mock_dataset
from model.errors import CellEvaluationError, ConfigError, UspError
from model.normal_normal import require_propriety
from model.types import Dataset
from priors.usp import PriorSpec
from sampler.chain import check_level, run_chain
from sampler.config import SamplerConfig
from stochastics.rng import RngStream, derive_seed
from utils.logging_config import get_logger

logger = get_logger(__name__)

DEFAULT_LEVEL = 0.95


# ==================== RESULTS ====================

@dataclass(eq=False)
class CoverageResult:
    """Coverage estimates of one (prior, generative point) cell"""

    per_group_rb: NDArray[np.float64]
    per_group_rb_var: NDArray[np.float64]
    per_group_naive: NDArray[np.float64]
    per_group_naive_var: NDArray[np.float64]
    overall_rb: float
    overall_rb_var: float
    overall_naive: float
    overall_naive_var: float
    level: float = DEFAULT_LEVEL
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def overall_rb_se(self) -> float:
        return float(np.sqrt(self.overall_rb_var))

    @property
    def overall_naive_se(self) -> float:
        return float(np.sqrt(self.overall_naive_var))

    @property
    def k(self) -> int:
        return self.per_group_rb.size

    def to_dict(self) -> Dict[str, Any]:
        return {
            'per_group_rb': self.per_group_rb.tolist(),
            'per_group_rb_var': self.per_group_rb_var.tolist(),
            'per_group_naive': self.per_group_naive.tolist(),
            'per_group_naive_var': self.per_group_naive_var.tolist(),
            'overall_rb': self.overall_rb,
            'overall_rb_var': self.overall_rb_var,
            'overall_naive': self.overall_naive,
            'overall_naive_var': self.overall_naive_var,
            'level': self.level,
            'metadata': self.metadata,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CoverageResult":
        arrays = {
            key: np.asarray(data[key], dtype=float)
            for key in ('per_group_rb', 'per_group_rb_var', 'per_group_naive', 'per_group_naive_var')
        }
        scalars = {
            key: float(data[key])
            for key in ('overall_rb', 'overall_rb_var', 'overall_naive', 'overall_naive_var', 'level')
        }
        return cls(**arrays, **scalars, metadata=dict(data.get('metadata', {})))


@dataclass
class CellFailure:
    prior_index: int
    grid_index: int
    prior_label: str
    generative_label: str
    message: str

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


@dataclass
class CampaignResult:
    """prior x grid matrix of cell results; failed cells hold None"""

    cells: List[List[Optional[CoverageResult]]]
    failures: List[CellFailure] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def results(self) -> List[CoverageResult]:
        """Successful cells in (prior, grid) order."""
        return [cell for row in self.cells for cell in row if cell is not None]

    @property
    def n_cells(self) -> int:
        return sum(len(row) for row in self.cells)


# ==================== SIMULATION WORKER ====================

@dataclass(frozen=True, eq=False)
class CellTask:
    """Everything a worker process needs to run one simulation of a cell"""

    template: Dataset
    prior: PriorSpec
    gen: GenerativeConfig
    chain_config: SamplerConfig
    level: float
    cell_seed: int


@dataclass(frozen=True)
class SimulationOutcome:
    rb_terms: NDArray[np.float64]
    indicators: NDArray[np.int64]
    acceptance_rate: float
    mean_theta_ess: float


def simulate_once(task: CellTask, simulation: int) -> SimulationOutcome:
    """
    One mock dataset, one chain, k RB terms and k indicators.

    Args:
        task: Cell description
        simulation: 0-based simulation index, also the stream id

    Returns:
        SimulationOutcome
    """
    rng = RngStream(task.cell_seed, simulation)
    try:
        thetas_true, mock = generate_mock_dataset(task.template, task.gen, rng)
        samples = run_chain(mock, task.prior, task.chain_config, rng)
        low, upp = samples.intervals(task.level)
        outcome = SimulationOutcome(
            rb_terms=rb_coverage_terms_batch(mock, task.gen, low, upp),
            indicators=coverage_indicators(thetas_true, low, upp),
            acceptance_rate=samples.acceptance_rate,
            mean_theta_ess=samples.mean_theta_ess(),
        )
    except (UspError, ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
        raise CellEvaluationError(simulation, e) from e
    logger.debug(
        f"Simulation {simulation}: acceptance {outcome.acceptance_rate:.3f}, "
        f"RB mean {outcome.rb_terms.mean():.4f}"
    )
    return outcome


class _TaskRunner:
    """Picklable callable binding a CellTask for Pool.imap"""

    def __init__(self, task: CellTask):
        self.task = task

    def __call__(self, simulation: int) -> SimulationOutcome:
        return simulate_once(self.task, simulation)


# ==================== DRIVERS ====================

def evaluate_cell(
    template: Dataset,
    prior: PriorSpec,
    gen: GenerativeConfig,
    chain_config: SamplerConfig = None,
    master_seed: int = 0,
    level: float = DEFAULT_LEVEL,
    cell_index: Tuple[int, int] = (0, 0),
    parallelism: int = 1,
    pool=None,
) -> CoverageResult:
    """
    Frequency coverage of the level-`level` intervals for one cell.

    Args:
        template: Dataset supplying V_j and x_j
        prior: Prior used by every fitted chain
        gen: Generative values and n_sim
        chain_config: Sampler settings (beta starts at beta_gen when init_beta is 'generative')
        master_seed: Campaign seed
        level: Nominal interval level
        cell_index: (prior index, grid index) used to derive the cell seed
        parallelism: Worker processes when no pool is given
        pool: Existing multiprocessing pool to reuse

    Returns:
        CoverageResult with RB and naive estimates
    """
    chain_config = chain_config or SamplerConfig()
    check_level(level)
    if gen.n_sim < 2:
        raise ConfigError(f"coverage variance estimates need n_sim >= 2, got {gen.n_sim}")
    require_propriety(template.k, template.p, template.m)
    gen.check_template(template)
    if chain_config.init_beta == "generative":
        chain_config = chain_config.with_generative_beta(gen.beta_gen)

    cell_seed = derive_seed(master_seed, *cell_index)
    task = CellTask(template, prior, gen, chain_config, level, cell_seed)
    logger.info(
        f"Cell {cell_index}: {prior.description} at {gen.label}, "
        f"{gen.n_sim} simulations x {chain_config.total_iterations} iterations"
    )

    runner = _TaskRunner(task)
    if pool is None and parallelism > 1:
        context = Pool(parallelism)
    else:
        context = nullcontext(pool)
    with context as active_pool:
        if active_pool is None:
            outcomes = [runner(i) for i in range(gen.n_sim)]
        else:
            outcomes = list(active_pool.imap(runner, range(gen.n_sim)))

    terms = np.stack([o.rb_terms for o in outcomes])
    indicators = np.stack([o.indicators for o in outcomes])
    rb = rb_estimate(terms)
    naive = naive_estimate(indicators)
    ess = np.array([o.mean_theta_ess for o in outcomes])

    result = CoverageResult(
        per_group_rb=rb.per_group,
        per_group_rb_var=rb.per_group_var,
        per_group_naive=naive.per_group,
        per_group_naive_var=naive.per_group_var,
        overall_rb=rb.overall,
        overall_rb_var=rb.overall_var,
        overall_naive=naive.overall,
        overall_naive_var=naive.overall_var,
        level=level,
        metadata={
            'dataset': template.label,
            'prior': prior.description,
            'prior_config': prior.to_dict(),
            'generative': gen.to_dict(),
            'master_seed': int(master_seed),
            'cell_index': list(cell_index),
            'cell_seed': int(cell_seed),
            'sampler': chain_config.to_dict(),
            'mean_acceptance_rate': float(np.mean([o.acceptance_rate for o in outcomes])),
            'mean_theta_ess': float(np.nanmean(ess)) if np.isfinite(ess).any() else None,
        },
    )
    logger.info(
        f"Cell {cell_index} done: overall RB {result.overall_rb:.4f} "
        f"(SE {result.overall_rb_se:.4f}), naive {result.overall_naive:.4f}"
    )
    return result


def run_campaign(
    template: Dataset,
    priors: Sequence[PriorSpec],
    grid: Sequence[GenerativeConfig],
    chain_config: SamplerConfig = None,
    master_seed: int = 0,
    parallelism: int = 1,
    level: float = DEFAULT_LEVEL,
    progress: bool = True,
) -> CampaignResult:
    """
    Evaluate every (prior, grid point) cell.

    A failing cell is logged and recorded; the campaign moves on.

    Args:
        template: Dataset supplying V_j and x_j
        priors: Priors, one campaign row each
        grid: Generative points, one campaign column each
        chain_config: Sampler settings
        master_seed: Campaign seed
        parallelism: Worker processes shared by all cells
        level: Nominal interval level
        progress: Show a progress bar over cells

    Returns:
        CampaignResult
    """
    if not priors or not grid:
        raise ConfigError("a campaign needs at least one prior and one grid point")
    chain_config = chain_config or SamplerConfig()
    cells: List[List[Optional[CoverageResult]]] = [[None] * len(grid) for _ in priors]
    failures: List[CellFailure] = []
    pairs = [(pi, gi) for pi in range(len(priors)) for gi in range(len(grid))]
    logger.info(
        f"Campaign: {len(priors)} priors x {len(grid)} grid points = {len(pairs)} cells, "
        f"parallelism {parallelism}, master seed {master_seed}"
    )

    context = Pool(parallelism) if parallelism > 1 else nullcontext(None)
    with context as pool:
        for pi, gi in tqdm(pairs, desc='Coverage cells', disable=not progress):
            prior, gen = priors[pi], grid[gi]
            try:
                cells[pi][gi] = evaluate_cell(
                    template, prior, gen, chain_config, master_seed,
                    level=level, cell_index=(pi, gi), pool=pool,
                )
            except UspError as e:
                logger.warning(f"Cell ({pi}, {gi}) {prior.description} at {gen.label} failed: {e}")
                failures.append(CellFailure(pi, gi, prior.description, gen.label, str(e)))

    if failures:
        logger.warning(f"{len(failures)} of {len(pairs)} cells failed")
    return CampaignResult(
        cells=cells,
        failures=failures,
        metadata={
            'dataset': template.label,
            'master_seed': int(master_seed),
            'level': level,
            'sampler': chain_config.to_dict(),
            'priors': [prior.description for prior in priors],
            'grid': [gen.label for gen in grid],
        },
    )
