"""
USP Coverage Command Line
=========================
Fits, single-cell coverage evaluations, campaigns and preset reproductions
for the Normal-Normal hierarchical model under uniform shrinkage priors.

Exit codes: 0 success, 1 configuration or usage error, 2 numeric failure.
"""

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

import numpy as np  # noqa: E402

from analysis.results_exporter import export_results, results_frame  # noqa: E402
from config.experiment_config import SCALES, get_experiment_config  # noqa: E402
from config.run_config import RunConfig, load_run_config, schema_text  # noqa: E402
from config.run_plan import RunPlan, build_run_plan  # noqa: E402
from coverage.evaluator import evaluate_cell, run_campaign  # noqa: E402
from datasets.builtin import list_builtins  # noqa: E402
from model.errors import ConfigError, DatasetError, UspError  # noqa: E402
from sampler.chain import run_chain  # noqa: E402
from stochastics.rng import RngStream  # noqa: E402
from utils.logging_config import configure_cli_logging, get_logger  # noqa: E402

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2

THREADS_ENV = 'USP_THREADS'

logger = get_logger('usp_coverage')


class UsageErrorParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors print the run-config schema and exit 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n\n")
        sys.stderr.write("Run configuration schema (--config):\n")
        sys.stderr.write(schema_text() + "\n")
        self.exit(EXIT_CONFIG)


# ==================== PARSER ====================

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str,
                        help='JSON run configuration (replaces the model flags)')
    common.add_argument('--seed', type=int,
                        help='Master seed (default: 0)')
    common.add_argument('--out', type=str,
                        help='Output directory for result files')
    common.add_argument('--parallelism', type=int,
                        help=f'Worker processes (default: 1; {THREADS_ENV} overrides)')
    common.add_argument('--verbose', '-v', action='store_true',
                        help='Debug logging')
    common.add_argument('--quiet', '-q', action='store_true',
                        help='Warnings and errors only')
    common.add_argument('--log-file', type=str,
                        help='Also write logs to this file')
    return common


def _model_options() -> argparse.ArgumentParser:
    model = argparse.ArgumentParser(add_help=False)
    model.add_argument('--dataset', type=str, default='eight-schools',
                       help='Builtin name or CSV path (default: eight-schools)')
    model.add_argument('--prior', type=str, action='append',
                       help='flat, usp-dm, usp-em, usp-dm:<delta>, usp-em-diag:<delta>, ... '
                            '(repeatable; default: usp-dm)')
    model.add_argument('--level', type=float, default=0.95,
                       help='Interval level (default: 0.95)')
    model.add_argument('--scale', choices=SCALES,
                       help='Chain length preset (default: 42000 iterations)')
    model.add_argument('--iterations', type=int, help='Total iterations per chain')
    model.add_argument('--burn-in', type=int, help='Burn-in iterations')
    model.add_argument('--thin', type=int, help='Keep every n-th draw')
    model.add_argument('--sigma', type=float, help='Log-scale proposal sd for p = 1 (default: 2)')
    model.add_argument('--nu', type=float, help='Inverse Wishart proposal df for p >= 2 (default: 40)')
    model.add_argument('--a-update', choices=['auto', 'log-normal', 'inverse-wishart', 'exact-flat'],
                       help='A update strategy (default: auto)')
    return model


def _grid_options() -> argparse.ArgumentParser:
    grid = argparse.ArgumentParser(add_help=False)
    points = grid.add_mutually_exclusive_group()
    points.add_argument('--b0', type=float, nargs='+',
                        help='Reference shrinkage B0 values (p = 1)')
    points.add_argument('--u', type=float, nargs='+',
                        help='Divisors u with A_gen = Sigma / u (p = 2)')
    points.add_argument('--a-gen', type=str,
                        help='Explicit A_gen as a JSON matrix, e.g. "[[162.1]]"')
    grid.add_argument('--beta-gen', type=str,
                      help='Comma-separated beta_gen, or "fit" (default: preset value or fit)')
    grid.add_argument('--n-sim', type=int,
                      help='Simulations per cell (default: 1000)')
    return grid


def build_parser() -> argparse.ArgumentParser:
    parser = UsageErrorParser(
        prog='usp_coverage',
        description='Uniform shrinkage prior fits and frequency-coverage evaluation',
        epilog='Examples:\n'
               '  python usp_coverage.py fit --dataset eight-schools --prior usp-dm --seed 7\n'
               '  python usp_coverage.py evaluate --b0 0.25 --prior usp-dm --n-sim 200 --scale desk\n'
               '  python usp_coverage.py reproduce eight-schools --scale desk --seed 1 --out results\n'
               '  python usp_coverage.py datasets',
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subcommands = parser.add_subparsers(dest='command', metavar='command')
    subcommands.required = True
    common, model, grid = _common_options(), _model_options(), _grid_options()

    subcommands.add_parser('fit', parents=[common, model],
                           help='Fit one model and print posterior summaries')
    subcommands.add_parser('evaluate', parents=[common, model, grid],
                           help='Coverage of one (prior, generative point) cell')
    subcommands.add_parser('campaign', parents=[common, model, grid],
                           help='Coverage over every prior x grid point')

    reproduce = subcommands.add_parser('reproduce', parents=[common],
                                       help='Run a shipped experiment preset')
    reproduce.add_argument('experiment', choices=get_experiment_config().get_experiment_names(),
                           help='Experiment preset')
    reproduce.add_argument('--scale', choices=SCALES, default='desk',
                           help='desk (n_sim 200, 12000 iterations) or paper (1000, 42000)')
    reproduce.add_argument('--svg', action='store_true',
                           help='Also draw SVG figures')

    subcommands.add_parser('datasets', help='List builtin datasets')
    return parser


# ==================== RUN CONFIG FROM FLAGS ====================

MODE_BY_COMMAND = {'fit': 'fit', 'evaluate': 'evaluate-cell', 'campaign': 'campaign'}


def _sampler_from_args(args) -> Dict[str, Any]:
    sampler: Dict[str, Any] = {}
    if args.scale:
        sizes = get_experiment_config().get_scale(args.scale)
        sampler.update({key: sizes[key] for key in ('total_iterations', 'burn_in', 'thin')})
    flags = {
        'total_iterations': args.iterations,
        'burn_in': args.burn_in,
        'thin': args.thin,
        'proposal_sigma': args.sigma,
        'proposal_nu': args.nu,
        'a_update': args.a_update,
    }
    sampler.update({key: value for key, value in flags.items() if value is not None})
    return sampler


def _preset_for_dataset(dataset: str) -> Optional[Dict[str, Any]]:
    presets = get_experiment_config()
    for name in presets.get_experiment_names():
        experiment = presets.get_experiment(name)
        if experiment['dataset'] == dataset:
            return experiment
    return None


def _grid_from_args(args) -> Dict[str, Any]:
    if args.b0:
        return {'rule': 'univariate-b0', 'values': args.b0}
    if args.u:
        return {'rule': 'bivariate-u', 'values': args.u}
    if args.a_gen:
        try:
            matrix = json.loads(args.a_gen)
        except json.JSONDecodeError as e:
            raise ConfigError(f"--a-gen is not a JSON matrix: {e}") from e
        return {'rule': 'explicit', 'points': [{'A_gen': matrix, 'label': f'A_gen={args.a_gen}'}]}
    raise ConfigError("give the generative grid with --b0, --u or --a-gen")


def run_config_from_args(args) -> Dict[str, Any]:
    """Run-config document built from command-line flags."""
    if args.command == 'reproduce':
        return get_experiment_config().to_run_config(
            args.experiment, scale=args.scale, svg=args.svg,
        )

    data: Dict[str, Any] = {
        'mode': MODE_BY_COMMAND[args.command],
        'dataset': args.dataset,
        'priors': args.prior or ['usp-dm'],
        'level': args.level,
        'sampler': _sampler_from_args(args),
    }
    if args.command == 'fit':
        return data

    data['grid'] = _grid_from_args(args)
    if args.n_sim is not None:
        data['n_sim'] = args.n_sim
    preset = _preset_for_dataset(args.dataset)
    if args.beta_gen and args.beta_gen != 'fit':
        try:
            data['beta_gen'] = [float(v) for v in args.beta_gen.split(',')]
        except ValueError as e:
            raise ConfigError(f"--beta-gen must be comma-separated numbers or 'fit': {e}") from e
    elif args.beta_gen is None and preset is not None:
        data['beta_gen'] = preset['beta_gen']
        if preset['beta_gen'] == 'fit' and 'beta_gen_fit' in preset:
            data['beta_gen_fit'] = preset['beta_gen_fit']
        if 'init_beta' in preset.get('sampler', {}):
            data['sampler'].setdefault('init_beta', preset['sampler']['init_beta'])
    else:
        data['beta_gen'] = 'fit'
    return data


def resolve_run_config(args) -> RunConfig:
    """--config file or flags, then seed / output / parallelism overrides."""
    if getattr(args, 'config', None):
        data = load_run_config(args.config).to_dict()
    else:
        data = run_config_from_args(args)
    if args.seed is not None:
        data['master_seed'] = args.seed
    if args.out is not None:
        data['output_dir'] = args.out
    if args.parallelism is not None:
        data['parallelism'] = args.parallelism
    threads = os.environ.get(THREADS_ENV)
    if threads:
        try:
            data['parallelism'] = int(threads)
        except ValueError as e:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got '{threads}'") from e
    return RunConfig.from_dict(data)


# ==================== COMMANDS ====================

def _print_banner(title: str):
    print("\n" + "=" * 70)
    print(title)
    print("=" * 70)


def command_fit(plan: RunPlan, export: bool = False) -> int:
    run_config = plan.run_config
    for index, prior in enumerate(plan.priors):
        samples = run_chain(
            plan.dataset, prior, plan.sampler,
            RngStream(run_config.master_seed, index), progress=True,
        )
        _print_banner(f"FIT: {plan.dataset.label} | {prior.description}")
        print(f"Draws kept: {samples.n_draws}   Acceptance rate (A): {samples.acceptance_rate:.3f}")
        print(f"\nRandom effects ({run_config.level:.0%} intervals):")
        print(samples.summary(run_config.level).to_string(float_format=lambda v: f"{v:10.3f}"))
        print("\nPosterior mean of A:")
        print(np.array2string(samples.posterior_mean_A(), precision=4))
        beta_mean = samples.posterior_mean_beta()
        beta_sd = samples.beta_draws.std(axis=0, ddof=1)
        print("\nPosterior of beta (mean, sd):")
        for i, (mean, sd) in enumerate(zip(beta_mean, beta_sd), start=1):
            print(f"  beta_{i}: {mean:10.4f}  {sd:8.4f}")
        ess = samples.ess_per_parameter
        print(f"\nESS: mean over random effects {samples.mean_theta_ess():.0f}; "
              + ", ".join(f"{key} {value:.0f}" for key, value in ess.items() if not key.startswith('theta_')))
    return EXIT_OK


def command_evaluate(plan: RunPlan, export: bool = False) -> int:
    run_config = plan.run_config
    if len(plan.priors) != 1 or len(plan.grid) != 1:
        raise ConfigError("evaluate needs exactly one prior and one generative point; use campaign")
    result = evaluate_cell(
        plan.dataset, plan.priors[0], plan.grid[0], plan.sampler,
        master_seed=run_config.master_seed, level=run_config.level,
        parallelism=run_config.parallelism,
    )
    _print_banner(f"COVERAGE: {plan.dataset.label} | {plan.priors[0].description} | {plan.grid[0].label}")
    print(f"Overall RB coverage:    {result.overall_rb:.4f} (SE {result.overall_rb_se:.4f})")
    print(f"Overall naive coverage: {result.overall_naive:.4f} (SE {result.overall_naive_se:.4f})")
    print(f"Mean acceptance rate:   {result.metadata['mean_acceptance_rate']:.3f}")
    print("Per-group RB: " + ", ".join(f"{v:.3f}" for v in result.per_group_rb))
    if export:
        paths = _export(plan, [result])
        print(f"\nResults: {paths['results_csv'].parent}")
    return EXIT_OK


def command_campaign(plan: RunPlan, export: bool = True) -> int:
    run_config = plan.run_config
    campaign = run_campaign(
        plan.dataset, plan.priors, plan.grid, plan.sampler,
        master_seed=run_config.master_seed, parallelism=run_config.parallelism,
        level=run_config.level,
    )
    _print_banner(f"CAMPAIGN: {plan.dataset.label} | {campaign.n_cells} cells")
    frame = results_frame(campaign.results())
    if not frame.empty:
        table = frame.pivot_table(index='generative', columns='prior', values='overall_rb', sort=False)
        print(table.to_string(float_format=lambda v: f"{v:.3f}"))
    if campaign.failures:
        print(f"\n{len(campaign.failures)} cells failed:")
        for failure in campaign.failures:
            print(f"  {failure.prior_label} at {failure.generative_label}: {failure.message}")
    if export:
        paths = _export(plan, campaign)
        print(f"\nResults: {paths['results_csv'].parent}")
    return EXIT_OK


def _export(plan: RunPlan, results):
    run_config = plan.run_config
    return export_results(
        results,
        run_config.output_dir,
        run_config=run_config.to_dict(),
        master_seed=run_config.master_seed,
        partial_series=run_config.figures.get('partial_series'),
        extra={'beta_gen': plan.beta_gen.tolist(), 'beta_gen_source': plan.beta_gen_source},
        svg=run_config.svg,
    )


def command_datasets() -> int:
    _print_banner("BUILTIN DATASETS")
    for builtin in list_builtins():
        print(f"  {builtin.name:15s} {builtin.description}")
    return EXIT_OK


COMMANDS = {
    'fit': command_fit,
    'evaluate': command_evaluate,
    'campaign': command_campaign,
    'reproduce': command_campaign,
}


def report_config_error(error: Exception) -> int:
    logger.error(f"Configuration error: {error}")
    print(f"Error: {error}", file=sys.stderr)
    return EXIT_CONFIG


def main(argv: Optional[List[str]] = None) -> int:
    """Command-line entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_cli_logging(
        verbose=getattr(args, 'verbose', False),
        quiet=getattr(args, 'quiet', False),
        log_file=getattr(args, 'log_file', None),
    )

    if args.command == 'datasets':
        return command_datasets()

    try:
        run_config = resolve_run_config(args)
        plan = build_run_plan(run_config)
        export = args.command in ('campaign', 'reproduce') or args.out is not None or args.config is not None
        return COMMANDS[args.command](plan, export=export)
    except (ConfigError, DatasetError) as e:
        return report_config_error(e)
    except UspError as e:
        logger.error(f"Numeric failure: {e}")
        print(f"Numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        return report_config_error(e)


if __name__ == "__main__":
    sys.exit(main())
