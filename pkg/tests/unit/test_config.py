"""
Unit tests for run configurations, experiment presets and run plans
"""
import json

import numpy as np
import pytest

from config.experiment_config import ExperimentConfig, get_experiment_config
from config.run_config import RunConfig, load_run_config, schema_text, validate_run_config
from config.run_plan import build_run_plan, resolve_priors
from model.errors import ConfigError


def fast_sampler():
    return {'total_iterations': 120, 'burn_in': 20, 'thin': 2}


class TestRunConfigValidation:
    """Tests for schema validation"""

    def test_minimal(self):
        """Test mode and dataset are enough"""
        config = RunConfig.from_dict({'mode': 'fit', 'dataset': 'eight-schools'})
        assert config.priors == ['usp-dm']
        assert config.level == 0.95
        assert config.n_sim == 1000

    def test_unknown_key(self):
        """Test unknown top-level keys are rejected"""
        with pytest.raises(ConfigError, match="nsim"):
            validate_run_config({'mode': 'fit', 'dataset': 'eight-schools', 'nsim': 5})

    def test_unknown_sampler_key(self):
        """Test unknown nested keys name their path"""
        with pytest.raises(ConfigError, match="sampler"):
            validate_run_config({'mode': 'fit', 'dataset': 'x', 'sampler': {'iters': 10}})

    def test_bad_mode(self):
        """Test modes are enumerated"""
        with pytest.raises(ConfigError):
            RunConfig.from_dict({'mode': 'plot', 'dataset': 'eight-schools'})

    def test_n_sim_minimum(self):
        """Test n_sim must allow a variance estimate"""
        with pytest.raises(ConfigError):
            validate_run_config({'mode': 'campaign', 'dataset': 'x', 'n_sim': 1})

    def test_b0_range(self):
        """Test B0 grid values lie in (0, 1]"""
        grid = {'rule': 'univariate-b0', 'values': [0.5, 1.5]}
        with pytest.raises(ConfigError):
            validate_run_config({'mode': 'campaign', 'dataset': 'x', 'grid': grid})

    def test_prior_objects(self):
        """Test structured priors validate"""
        priors = [{'kind': 'flat'}, {'kind': 'usp', 'rule': 'explicit', 'V0': [[1.0]], 'delta': 10}]
        validate_run_config({'mode': 'fit', 'dataset': 'x', 'priors': priors})

    def test_schema_text_is_json(self):
        """Test the printable schema parses"""
        assert json.loads(schema_text())['title'] == "usp-coverage run configuration"


class TestLoadRunConfig:
    """Tests for load_run_config"""

    def test_round_trip(self, tmp_path):
        """Test to_dict output reloads unchanged"""
        config = RunConfig.from_dict({
            'mode': 'campaign', 'dataset': 'eight-schools', 'priors': ['usp-dm', 'flat'],
            'grid': {'rule': 'univariate-b0', 'values': [0.25]}, 'beta_gen': [7.95],
            'sampler': fast_sampler(), 'n_sim': 3, 'master_seed': 9,
        })
        path = tmp_path / "run.json"
        path.write_text(json.dumps(config.to_dict()), encoding="utf-8")
        assert load_run_config(path).to_dict() == config.to_dict()

    def test_missing_file(self, tmp_path):
        """Test a missing file is a ConfigError"""
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        """Test malformed JSON is a ConfigError"""
        path = tmp_path / "bad.json"
        path.write_text("{mode: fit", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_run_config(path)

    def test_not_an_object(self, tmp_path):
        """Test the document must be an object"""
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_run_config(path)


class TestExperimentConfig:
    """Tests for the shipped presets"""

    def test_presets(self):
        """Test both experiments and scales are present"""
        presets = get_experiment_config()
        assert presets.get_experiment_names() == ['eight-schools', 'hospital']
        assert presets.get_scale('paper')['total_iterations'] == 42000
        assert presets.get_scale('desk')['n_sim'] == 200

    def test_eight_schools_preset(self):
        """Test the generative beta and prior rows"""
        experiment = get_experiment_config().get_experiment('eight-schools')
        assert experiment['beta_gen'] == [7.95]
        assert len(experiment['priors']) == 6
        assert experiment['grid']['values'][2] == 0.25

    def test_presets_are_copies(self):
        """Test callers cannot mutate the loaded presets"""
        presets = get_experiment_config()
        presets.get_experiment('hospital')['priors'].clear()
        assert len(presets.get_experiment('hospital')['priors']) == 6

    @pytest.mark.parametrize("name", ['eight-schools', 'hospital'])
    @pytest.mark.parametrize("scale", ['desk', 'paper'])
    def test_run_configs_validate(self, name, scale):
        """Test every preset produces a valid run configuration"""
        data = get_experiment_config().to_run_config(name, scale=scale, master_seed=3)
        config = RunConfig.from_dict(data)
        assert config.mode == 'reproduce'
        assert config.sampler['total_iterations'] == get_experiment_config().get_scale(scale)['total_iterations']

    def test_hospital_fit_provenance(self):
        """Test the hospital beta_gen fit carries its seed and draws"""
        data = get_experiment_config().to_run_config('hospital', scale='paper')
        assert data['beta_gen'] == 'fit'
        assert data['beta_gen_fit'] == {'prior': 0, 'seed': 27, 'draws': 100000}

    def test_unknown_experiment(self):
        """Test unknown names raise ConfigError"""
        with pytest.raises(ConfigError):
            get_experiment_config().get_experiment('radon')

    def test_unknown_scale(self):
        """Test unknown scales raise ConfigError"""
        with pytest.raises(ConfigError):
            get_experiment_config().get_scale('huge')

    def test_unreadable_file(self, tmp_path):
        """Test a broken preset file raises ConfigError"""
        path = tmp_path / "experiments.yaml"
        path.write_text("scales: [unclosed", encoding="utf-8")
        with pytest.raises(ConfigError):
            ExperimentConfig(str(path))


class TestRunPlan:
    """Tests for build_run_plan"""

    def test_fit_plan(self):
        """Test fit mode resolves the dataset and priors only"""
        plan = build_run_plan(RunConfig.from_dict({
            'mode': 'fit', 'dataset': 'eight-schools', 'priors': ['usp-dm:100', 'flat'],
        }))
        assert plan.dataset.k == 8
        assert [p.description for p in plan.priors] == ["USP V0=10^2 x DM", "Flat"]
        assert plan.grid == []

    def test_univariate_grid(self):
        """Test the B0 grid is built against V_DM"""
        plan = build_run_plan(RunConfig.from_dict({
            'mode': 'campaign', 'dataset': 'eight-schools',
            'grid': {'rule': 'univariate-b0', 'values': [0.25, 0.5]},
            'beta_gen': [7.95], 'n_sim': 5, 'sampler': fast_sampler(),
        }))
        assert [gen.A_gen[0, 0] for gen in plan.grid] == pytest.approx([397.93, 132.644], abs=0.01)
        assert plan.grid[0].n_sim == 5
        assert plan.beta_gen_source == {'source': 'config'}

    def test_bivariate_grid_uses_builtin_sigma(self):
        """Test the hospital grid takes Sigma from the builtin record"""
        plan = build_run_plan(RunConfig.from_dict({
            'mode': 'campaign', 'dataset': 'hospital-27',
            'grid': {'rule': 'bivariate-u', 'values': [1.0]},
            'beta_gen': [10.0, 5.0, 12.0, 4.0], 'sampler': fast_sampler(),
        }))
        np.testing.assert_allclose(plan.grid[0].A_gen, plan.builtin.aux['Sigma'])
        assert plan.grid[0].b0 == pytest.approx(0.25)

    def test_univariate_grid_needs_p1(self):
        """Test a B0 grid on bivariate data is rejected"""
        with pytest.raises(ConfigError):
            build_run_plan(RunConfig.from_dict({
                'mode': 'campaign', 'dataset': 'hospital-27',
                'grid': {'rule': 'univariate-b0', 'values': [0.5]},
                'beta_gen': [0.0, 0.0, 0.0, 0.0],
            }))

    def test_beta_gen_length(self):
        """Test beta_gen must have m*p entries"""
        with pytest.raises(ConfigError):
            build_run_plan(RunConfig.from_dict({
                'mode': 'campaign', 'dataset': 'eight-schools',
                'grid': {'rule': 'univariate-b0', 'values': [0.5]},
                'beta_gen': [1.0, 2.0],
            }))

    def test_beta_gen_fit(self):
        """Test beta_gen from a fit records its provenance"""
        plan = build_run_plan(RunConfig.from_dict({
            'mode': 'evaluate-cell', 'dataset': 'eight-schools',
            'grid': {'rule': 'univariate-b0', 'values': [0.5]},
            'beta_gen': 'fit', 'beta_gen_fit': {'seed': 4, 'draws': 100},
            'sampler': fast_sampler(),
        }))
        assert plan.beta_gen.shape == (1,)
        assert plan.beta_gen_source['source'] == 'fit'
        assert plan.beta_gen_source['seed'] == 4
        assert plan.beta_gen_source['draws'] == 100

    def test_missing_grid(self):
        """Test coverage modes need a grid"""
        with pytest.raises(ConfigError):
            build_run_plan(RunConfig.from_dict({'mode': 'campaign', 'dataset': 'eight-schools'}))

    def test_explicit_grid(self):
        """Test explicit A_gen points keep their labels"""
        plan = build_run_plan(RunConfig.from_dict({
            'mode': 'campaign', 'dataset': 'eight-schools',
            'grid': {'rule': 'explicit', 'points': [{'A_gen': [[50.0]], 'label': 'A=50'}, {'A_gen': [[0.0]]}]},
            'beta_gen': [7.95],
        }))
        assert [gen.label for gen in plan.grid] == ['A=50', 'point 2']
        assert plan.grid[1].is_degenerate

    def test_resolve_priors_mixed(self, eight_schools_dataset):
        """Test tokens and objects can be mixed"""
        priors = resolve_priors(['flat', {'kind': 'usp', 'rule': 'arithmetic'}], eight_schools_dataset)
        assert priors[1].V0[0, 0] == pytest.approx(166.0)
