"""Dataset ingestion, configuration, grid orchestration and reporting."""

from .config import AlgorithmSpec, BenchmarkConfig, config_from_mapping, load_config
from .grid import ResultsTable, Setting, build_settings, emit_results, run_grid, summary_rows
from .io import load_csv, read_results, write_dataset_csv, write_results
from .prep import prep_dataset
from .report import read_cliques, render_cd

__all__ = [
    "AlgorithmSpec", "BenchmarkConfig", "config_from_mapping", "load_config", "ResultsTable",
    "Setting", "build_settings", "emit_results", "run_grid", "summary_rows", "load_csv",
    "read_results", "write_dataset_csv", "write_results", "prep_dataset", "read_cliques", "render_cd",
]
