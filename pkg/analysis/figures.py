"""
Coverage Figures
================
Static SVG line charts of overall RB coverage against reference shrinkage,
drawn from the figure tables written by the results exporter.
"""

from pathlib import Path

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from utils.logging_config import get_logger  # noqa: E402

logger = get_logger(__name__)


def write_coverage_svg(frame: pd.DataFrame, path: Path, level: float = 0.95) -> Path:
    """
    One line per prior with +-2 SE bars and a dashed line at the nominal level.

    Args:
        frame: Output of figure_frame (b0, generative, <prior>, <prior>_se, ...)
        path: Target .svg file
        level: Nominal coverage level

    Returns:
        The written path
    """
    path = Path(path)
    series = [col for col in frame.columns if col not in ('b0', 'generative') and not col.endswith('_se')]

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label in series:
        ax.errorbar(
            frame['b0'], frame[label], yerr=2.0 * frame[f'{label}_se'],
            marker='o', markersize=3, capsize=2, linewidth=1, label=label,
        )
    ax.axhline(level, color='grey', linestyle='--', linewidth=0.8)
    ax.set_xlabel('reference shrinkage')
    ax.set_ylabel('overall RB coverage')
    if series:
        ax.legend(fontsize='small')
    fig.tight_layout()
    fig.savefig(path, format='svg')
    plt.close(fig)
    logger.info(f"Figure written to {path}")
    return path
