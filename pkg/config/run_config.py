"""
Run Configuration
=================
JSON run configurations validated against run_config.schema.json before any
computation. Unknown keys anywhere in the document are errors.
"""

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import jsonschema

from model.errors import ConfigError

SCHEMA_PATH = Path(__file__).parent / 'run_config.schema.json'

MODES = ("fit", "evaluate-cell", "campaign", "reproduce")
DEFAULT_LEVEL = 0.95
DEFAULT_N_SIM = 1000
DEFAULT_OUTPUT_DIR = "results"


@lru_cache(maxsize=1)
def load_schema() -> Dict[str, Any]:
    with open(SCHEMA_PATH, 'r', encoding='utf-8') as f:
        return json.load(f)


def schema_text() -> str:
    """The run-config schema, pretty-printed for usage messages."""
    return json.dumps(load_schema(), indent=2)


def validate_run_config(data: Dict[str, Any]):
    """
    Validate a run-config document.

    Args:
        data: Parsed JSON document

    Raises:
        ConfigError: naming the first offending path
    """
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        error = errors[0]
        where = "/".join(str(part) for part in error.absolute_path) or "<root>"
        raise ConfigError(f"run config invalid at {where}: {error.message}")


@dataclass
class RunConfig:
    """A validated run configuration"""

    mode: str
    dataset: str
    priors: List[Union[str, Dict[str, Any]]] = field(default_factory=lambda: ["usp-dm"])
    grid: Optional[Dict[str, Any]] = None
    beta_gen: Optional[Union[str, List[float]]] = None
    beta_gen_fit: Dict[str, Any] = field(default_factory=dict)
    sampler: Dict[str, Any] = field(default_factory=dict)
    level: float = DEFAULT_LEVEL
    n_sim: int = DEFAULT_N_SIM
    master_seed: int = 0
    parallelism: int = 1
    output_dir: str = DEFAULT_OUTPUT_DIR
    experiment: Optional[str] = None
    scale: Optional[str] = None
    svg: bool = False
    figures: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        validate_run_config(self.to_dict())

    def to_dict(self) -> Dict[str, Any]:
        """Schema-shaped dict; unset optional entries are left out."""
        data = {
            'mode': self.mode,
            'dataset': self.dataset,
            'priors': list(self.priors),
            'level': self.level,
            'n_sim': self.n_sim,
            'master_seed': self.master_seed,
            'parallelism': self.parallelism,
            'output_dir': self.output_dir,
            'svg': self.svg,
        }
        optional = {
            'grid': self.grid,
            'beta_gen': self.beta_gen,
            'beta_gen_fit': self.beta_gen_fit,
            'sampler': self.sampler,
            'experiment': self.experiment,
            'scale': self.scale,
            'figures': self.figures,
        }
        data.update({key: value for key, value in optional.items() if value not in (None, {}, [])})
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        validate_run_config(data)
        return cls(**data)


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """
    Read and validate a JSON run configuration.

    Args:
        path: JSON file

    Returns:
        RunConfig
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"run config {path} not found") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"run config {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"run config {path} must hold a JSON object")
    return RunConfig.from_dict(data)
