"""
Unit tests for the usp_coverage command line
"""
import json

import pytest

from model.errors import DegenerateChainError, DimensionMismatchError, NotPositiveDefiniteError
from usp_coverage import (
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_OK,
    THREADS_ENV,
    build_parser,
    main,
    resolve_run_config,
    run_config_from_args,
)
from utils.logging_config import reset_logging

SHORT_CHAIN = ['--iterations', '120', '--burn-in', '20', '--thin', '2']


@pytest.fixture(autouse=True)
def clean_cli_state(monkeypatch):
    """Fresh logging handlers and no thread override for every test"""
    monkeypatch.delenv(THREADS_ENV, raising=False)
    reset_logging()
    yield
    reset_logging()


class TestParser:
    """Tests for flag parsing into run configurations"""

    def test_fit_defaults(self):
        """Test fit uses the eight schools data and the DM prior"""
        args = build_parser().parse_args(['fit'])
        data = run_config_from_args(args)
        assert data == {
            'mode': 'fit', 'dataset': 'eight-schools', 'priors': ['usp-dm'],
            'level': 0.95, 'sampler': {},
        }

    def test_scale_and_overrides(self):
        """Test explicit chain flags override the scale preset"""
        args = build_parser().parse_args(['fit', '--scale', 'desk', '--thin', '5', '--sigma', '1.5'])
        sampler = run_config_from_args(args)['sampler']
        assert sampler == {'total_iterations': 12000, 'burn_in': 2000, 'thin': 5, 'proposal_sigma': 1.5}

    def test_evaluate_uses_preset_beta(self):
        """Test the eight schools preset supplies beta_gen"""
        args = build_parser().parse_args(['evaluate', '--b0', '0.25'])
        data = run_config_from_args(args)
        assert data['mode'] == 'evaluate-cell'
        assert data['grid'] == {'rule': 'univariate-b0', 'values': [0.25]}
        assert data['beta_gen'] == [7.95]

    def test_hospital_fit_beta(self):
        """Test the hospital preset asks for a beta_gen fit"""
        args = build_parser().parse_args(['campaign', '--dataset', 'hospital-27', '--u', '1.0', '2.04'])
        data = run_config_from_args(args)
        assert data['beta_gen'] == 'fit'
        assert data['beta_gen_fit']['seed'] == 27
        assert data['sampler']['init_beta'] == 'generative'

    def test_explicit_beta_gen(self):
        """Test comma-separated beta_gen"""
        args = build_parser().parse_args(['evaluate', '--a-gen', '[[50]]', '--beta-gen', '1.5'])
        data = run_config_from_args(args)
        assert data['beta_gen'] == [1.5]
        assert data['grid']['points'][0]['A_gen'] == [[50]]

    def test_reproduce(self):
        """Test reproduce expands the preset"""
        args = build_parser().parse_args(['reproduce', 'hospital', '--scale', 'paper', '--seed', '4'])
        config = resolve_run_config(args)
        assert config.mode == 'reproduce'
        assert config.n_sim == 1000
        assert config.master_seed == 4

    def test_threads_env(self, monkeypatch):
        """Test USP_THREADS sets the parallelism"""
        monkeypatch.setenv(THREADS_ENV, '3')
        args = build_parser().parse_args(['fit', '--parallelism', '2'])
        assert resolve_run_config(args).parallelism == 3

    def test_missing_grid(self):
        """Test evaluate without a grid flag"""
        from model.errors import ConfigError

        args = build_parser().parse_args(['evaluate'])
        with pytest.raises(ConfigError):
            run_config_from_args(args)


class TestMain:
    """Tests for main() exit codes and output"""

    def test_datasets(self, capsys):
        """Test the builtin listing"""
        assert main(['datasets']) == EXIT_OK
        out = capsys.readouterr().out
        assert 'eight-schools' in out
        assert 'hospital-27' in out

    def test_fit(self, capsys):
        """Test a short fit prints the posterior summaries"""
        assert main(['fit', '--seed', '3', '-q'] + SHORT_CHAIN) == EXIT_OK
        out = capsys.readouterr().out
        assert 'Posterior mean of A' in out
        assert 'beta_1' in out

    def test_bad_prior_token(self, capsys):
        """Test an unknown prior is a configuration error"""
        assert main(['fit', '--prior', 'usp-xx', '-q']) == EXIT_CONFIG
        assert 'usp-xx' in capsys.readouterr().err

    def test_unknown_flag_prints_schema(self, capsys):
        """Test usage errors exit 1 with the run-config schema"""
        with pytest.raises(SystemExit) as excinfo:
            main(['fit', '--bogus'])
        assert excinfo.value.code == EXIT_CONFIG
        assert '"$schema"' in capsys.readouterr().err

    def test_evaluate_writes_results(self, tmp_path, capsys):
        """Test a small cell evaluation exports when --out is given"""
        out_dir = tmp_path / "cell"
        code = main(['evaluate', '--b0', '0.5', '--n-sim', '3', '--seed', '1', '-q', '--out', str(out_dir)]
                    + SHORT_CHAIN)
        assert code == EXIT_OK
        assert 'Overall RB coverage' in capsys.readouterr().out
        document = json.loads((out_dir / 'results.json').read_text(encoding='utf-8'))
        assert document['beta_gen'] == [7.95]
        assert document['run_config']['mode'] == 'evaluate-cell'
        assert (out_dir / 'results.csv').exists()

    def test_evaluate_needs_one_cell(self):
        """Test evaluate rejects more than one grid point"""
        assert main(['evaluate', '--b0', '0.25', '0.5', '--n-sim', '3', '-q'] + SHORT_CHAIN) == EXIT_CONFIG

    def test_invalid_threads_env(self, monkeypatch):
        """Test a non-integer USP_THREADS is a configuration error"""
        monkeypatch.setenv(THREADS_ENV, 'many')
        assert main(['fit', '-q'] + SHORT_CHAIN) == EXIT_CONFIG

    def test_campaign_from_config(self, tmp_path, capsys):
        """Test a JSON run configuration drives a campaign"""
        config = {
            'mode': 'campaign',
            'dataset': 'eight-schools',
            'priors': ['usp-dm', 'flat'],
            'grid': {'rule': 'univariate-b0', 'values': [0.25]},
            'beta_gen': [7.95],
            'sampler': {'total_iterations': 120, 'burn_in': 20, 'thin': 2},
            'n_sim': 2,
            'output_dir': str(tmp_path / "campaign"),
        }
        path = tmp_path / "run.json"
        path.write_text(json.dumps(config), encoding='utf-8')
        assert main(['campaign', '--config', str(path), '-q']) == EXIT_OK
        assert 'CAMPAIGN' in capsys.readouterr().out
        assert (tmp_path / "campaign" / "figure_full.csv").exists()

    def test_config_file_errors(self, tmp_path):
        """Test an invalid JSON run configuration exits 1"""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({'mode': 'campaign', 'dataset': 'eight-schools', 'seeds': 3}), encoding='utf-8')
        assert main(['campaign', '--config', str(path), '-q']) == EXIT_CONFIG

    @pytest.mark.parametrize("error", [
        NotPositiveDefiniteError("V_j + A", "leading minor 2"),
        DimensionMismatchError("A is 2x2, p = 1"),
        DegenerateChainError("chain is constant"),
    ])
    def test_numeric_failures_exit_2(self, error, monkeypatch, capsys):
        """Test numeric errors that are also ValueErrors still exit with the numeric code"""
        def fail(*args, **kwargs):
            raise error

        monkeypatch.setattr('usp_coverage.run_chain', fail)
        assert main(['fit', '-q'] + SHORT_CHAIN) == EXIT_NUMERIC
        assert 'Numeric failure' in capsys.readouterr().err

    def test_plain_value_error_exits_1(self, monkeypatch):
        """Test a bare ValueError is reported as a configuration error"""
        def fail(*args, **kwargs):
            raise ValueError("level must lie in (0, 1)")

        monkeypatch.setattr('usp_coverage.run_chain', fail)
        assert main(['fit', '-q'] + SHORT_CHAIN) == EXIT_CONFIG
