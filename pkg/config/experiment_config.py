"""
Experiment Preset Loader
========================
Loads coverage experiment presets from experiments.yaml
"""

import copy
from pathlib import Path
from typing import Any, Dict, List

import yaml

from model.errors import ConfigError

SCALES = ("desk", "paper")


class ExperimentConfig:
    """Loads and provides access to experiment presets"""

    def __init__(self, config_path: str = None):
        """
        Load experiment presets

        Args:
            config_path: Path to experiments.yaml file
        """
        if config_path is None:
            # Default to config/experiments.yaml in project root
            project_root = Path(__file__).parent.parent
            config_path = project_root / 'config' / 'experiments.yaml'

        self.config_path = Path(config_path)
        self._load_config()

    def _load_config(self):
        """Load configuration from YAML file"""
        try:
            with open(self.config_path, 'r') as f:
                config = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"could not read presets from {self.config_path}: {e}") from e

        self.scales = config.get('scales', {})
        self.experiments = config.get('experiments', {})

    def get_experiment_names(self) -> List[str]:
        return list(self.experiments)

    def get_experiment(self, name: str) -> Dict[str, Any]:
        """Get a copy of one experiment preset"""
        if name not in self.experiments:
            raise ConfigError(
                f"unknown experiment '{name}' (known: {', '.join(self.experiments)})"
            )
        return copy.deepcopy(self.experiments[name])

    def get_scale(self, scale: str) -> Dict[str, Any]:
        if scale not in self.scales:
            raise ConfigError(f"unknown scale '{scale}' (known: {', '.join(self.scales)})")
        return dict(self.scales[scale])

    def to_run_config(
        self,
        name: str,
        scale: str = "desk",
        master_seed: int = 0,
        parallelism: int = 1,
        output_dir: str = "results",
        svg: bool = False,
    ) -> Dict[str, Any]:
        """
        Run-config document reproducing one experiment at one scale.

        Args:
            name: Experiment name ('eight-schools' or 'hospital')
            scale: 'desk' or 'paper'
            master_seed: Campaign seed
            parallelism: Worker processes
            output_dir: Where results are written
            svg: Also draw SVG figures

        Returns:
            Dict ready for RunConfig.from_dict
        """
        experiment = self.get_experiment(name)
        sizes = self.get_scale(scale)

        sampler = dict(experiment.get('sampler', {}))
        sampler.update({
            'total_iterations': sizes['total_iterations'],
            'burn_in': sizes['burn_in'],
            'thin': sizes['thin'],
        })
        run_config = {
            'mode': 'reproduce',
            'experiment': name,
            'scale': scale,
            'dataset': experiment['dataset'],
            'priors': experiment['priors'],
            'grid': experiment['grid'],
            'beta_gen': experiment['beta_gen'],
            'sampler': sampler,
            'n_sim': sizes['n_sim'],
            'master_seed': master_seed,
            'parallelism': parallelism,
            'output_dir': output_dir,
            'svg': svg,
        }
        if experiment['beta_gen'] == 'fit':
            fit = dict(experiment.get('beta_gen_fit', {}))
            fit.setdefault('draws', sizes['beta_gen_draws'])
            run_config['beta_gen_fit'] = fit
        if 'figures' in experiment:
            run_config['figures'] = experiment['figures']
        return run_config


# Singleton instance
_config_instance = None


def get_experiment_config() -> ExperimentConfig:
    """Get or create experiment configuration instance"""
    global _config_instance
    if _config_instance is None:
        _config_instance = ExperimentConfig()
    return _config_instance
