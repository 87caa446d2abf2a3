# Analysis package: result tables, exported files and coverage figures
from .results_exporter import export_results, figure_frame, load_results, read_results_csv, results_frame

__all__ = ['export_results', 'figure_frame', 'load_results', 'read_results_csv', 'results_frame']
