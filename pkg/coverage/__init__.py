# Coverage package: repeated-sampling frequency coverage of random-effect intervals
from .generative import (
    GenerativeConfig,
    bivariate_generative_grid,
    generate_mock_dataset,
    univariate_generative_grid,
)
from .estimators import coverage_indicator, rb_coverage_terms
from .evaluator import CampaignResult, CoverageResult, evaluate_cell, run_campaign

__all__ = [
    'GenerativeConfig', 'bivariate_generative_grid', 'generate_mock_dataset',
    'univariate_generative_grid', 'coverage_indicator', 'rb_coverage_terms',
    'CampaignResult', 'CoverageResult', 'evaluate_cell', 'run_campaign',
]
