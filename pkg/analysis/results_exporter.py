"""
Results Exporter
================
Writes coverage results as results.csv, results.json and plot-ready figure
CSVs (x = reference shrinkage, y = overall RB coverage, one column per prior),
and reads results.json back.

Every file starts with the run configuration and master seed.
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd

from coverage.evaluator import CampaignResult, CoverageResult
from utils.logging_config import get_logger

logger = get_logger(__name__)

RESULTS_CSV = 'results.csv'
RESULTS_JSON = 'results.json'
FIGURE_FULL_CSV = 'figure_full.csv'
FIGURE_PARTIAL_CSV = 'figure_partial.csv'

SUMMARY_COLUMNS = [
    'prior', 'delta', 'generative', 'b0',
    'overall_rb', 'overall_se', 'overall_naive', 'overall_naive_se',
    'mean_acceptance_rate', 'mean_theta_ess', 'n_sim',
]


# ==================== TABLES ====================

def _prior_delta(result: CoverageResult) -> Optional[float]:
    prior_config = result.metadata.get('prior_config', {})
    if prior_config.get('kind') == 'usp':
        return float(prior_config.get('delta', 1.0))
    return None


def results_frame(results: Sequence[CoverageResult], k: Optional[int] = None) -> pd.DataFrame:
    """
    One row per cell with the overall estimates and per-group RB estimates.

    Args:
        results: Cell results
        k: Number of groups (taken from the first result when omitted)

    Returns:
        DataFrame with SUMMARY_COLUMNS then rb_group_1..rb_group_k
    """
    if k is None:
        k = results[0].k if results else 0
    group_columns = [f'rb_group_{j}' for j in range(1, k + 1)]
    rows = []
    for result in results:
        generative = result.metadata.get('generative', {})
        row = {
            'prior': result.metadata.get('prior', ''),
            'delta': _prior_delta(result),
            'generative': generative.get('label', ''),
            'b0': generative.get('b0'),
            'overall_rb': result.overall_rb,
            'overall_se': result.overall_rb_se,
            'overall_naive': result.overall_naive,
            'overall_naive_se': result.overall_naive_se,
            'mean_acceptance_rate': result.metadata.get('mean_acceptance_rate'),
            'mean_theta_ess': result.metadata.get('mean_theta_ess'),
            'n_sim': generative.get('n_sim'),
        }
        row.update(dict(zip(group_columns, result.per_group_rb.tolist())))
        rows.append(row)
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS + group_columns)


def figure_frame(
    results: Sequence[CoverageResult],
    series: Optional[Sequence[str]] = None,
) -> pd.DataFrame:
    """
    Wide figure table: b0 and generative label, then one overall-RB column
    per prior (and a matching _se column).

    Args:
        results: Cell results
        series: Prior labels to keep, in order (all priors when None)

    Returns:
        DataFrame sorted by b0
    """
    frame = results_frame(results)
    if series is not None:
        frame = frame[frame['prior'].isin(series)]
    if frame.empty:
        columns = ['b0', 'generative']
        for label in series or []:
            columns += [label, f'{label}_se']
        return pd.DataFrame(columns=columns)

    order = list(series) if series is not None else list(dict.fromkeys(frame['prior']))
    frame = frame.assign(b0=pd.to_numeric(frame['b0']))
    missing = frame.loc[frame['b0'].isna(), 'generative'].unique()
    if len(missing):
        logger.info(f"No reference shrinkage for {', '.join(map(str, missing))}; listed after the b0 grid")

    # index on the grid label; explicit A_gen points carry no b0
    estimates = frame.pivot_table(index='generative', columns='prior', values='overall_rb', sort=False)
    errors = frame.pivot_table(index='generative', columns='prior', values='overall_se', sort=False)
    wide = frame.groupby('generative', sort=False)[['b0']].first()
    for label in order:
        if label in estimates.columns:
            wide[label] = estimates[label]
            wide[f'{label}_se'] = errors[label]
    wide = wide.reset_index()[['b0', 'generative'] + [c for c in wide.columns if c != 'b0']]
    return wide.sort_values('b0', kind='stable', na_position='last').reset_index(drop=True)


# ==================== WRITING ====================

def header_lines(run_config: Optional[Dict[str, Any]], master_seed: Optional[int]) -> List[str]:
    """'# ' comment lines carrying the run configuration and seed."""
    return [
        f"# run_config: {json.dumps(run_config or {}, sort_keys=True)}",
        f"# master_seed: {master_seed}",
    ]


def write_csv(frame: pd.DataFrame, path: Path, header: Iterable[str]):
    with open(path, 'w', encoding='utf-8', newline='') as f:
        for line in header:
            f.write(line + '\n')
        frame.to_csv(f, index=False)


def _unpack(results) -> Tuple[List[CoverageResult], List[Dict[str, Any]], Dict[str, Any]]:
    if isinstance(results, CampaignResult):
        return results.results(), [f.to_dict() for f in results.failures], results.metadata
    return list(results), [], {}


def export_results(
    results: Union[CampaignResult, Sequence[CoverageResult]],
    out_dir: Union[str, Path],
    run_config: Optional[Dict[str, Any]] = None,
    master_seed: Optional[int] = None,
    partial_series: Optional[Sequence[str]] = None,
    extra: Optional[Dict[str, Any]] = None,
    svg: bool = False,
) -> Dict[str, Path]:
    """
    Write results.csv, results.json and the figure CSVs.

    Args:
        results: CampaignResult or list of CoverageResult
        out_dir: Output directory (created if missing)
        run_config: Run configuration embedded in every file
        master_seed: Seed embedded in every file
        partial_series: Prior labels of the partial-result figure
        extra: Additional top-level entries for results.json (e.g. beta_gen provenance)
        svg: Also draw SVG line charts

    Returns:
        Mapping of file role to written path
    """
    cells, failures, campaign = _unpack(results)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if master_seed is None:
        master_seed = campaign.get('master_seed')
    header = header_lines(run_config, master_seed)
    paths = {}

    paths['results_csv'] = out_dir / RESULTS_CSV
    write_csv(results_frame(cells), paths['results_csv'], header)

    document = {
        'run_config': run_config or {},
        'master_seed': master_seed,
        'campaign': campaign,
        'failures': failures,
        'results': [cell.to_dict() for cell in cells],
    }
    document.update(extra or {})
    paths['results_json'] = out_dir / RESULTS_JSON
    with open(paths['results_json'], 'w', encoding='utf-8') as f:
        json.dump(document, f, indent=2, allow_nan=True)

    full = figure_frame(cells)
    paths['figure_full'] = out_dir / FIGURE_FULL_CSV
    write_csv(full, paths['figure_full'], header)
    figures = {'figure_full': full}

    if partial_series:
        partial = figure_frame(cells, partial_series)
        paths['figure_partial'] = out_dir / FIGURE_PARTIAL_CSV
        write_csv(partial, paths['figure_partial'], header)
        figures['figure_partial'] = partial

    if svg:
        from analysis.figures import write_coverage_svg

        for role, frame in figures.items():
            paths[f'{role}_svg'] = write_coverage_svg(
                frame, out_dir / f'{role}.svg', level=cells[0].level if cells else 0.95
            )

    logger.info(f"Exported {len(cells)} cells ({len(failures)} failures) to {out_dir}")
    return paths


# ==================== READING ====================

def load_results(path: Union[str, Path]) -> Tuple[List[CoverageResult], Dict[str, Any]]:
    """
    Reload results.json.

    Args:
        path: results.json file, or the directory holding it

    Returns:
        (CoverageResult records, full JSON document)
    """
    path = Path(path)
    if path.is_dir():
        path = path / RESULTS_JSON
    with open(path, 'r', encoding='utf-8') as f:
        document = json.load(f)
    return [CoverageResult.from_dict(entry) for entry in document.get('results', [])], document


def read_results_csv(path: Union[str, Path]) -> pd.DataFrame:
    """results.csv or a figure CSV, skipping the '# ' header lines."""
    return pd.read_csv(path, comment='#')
