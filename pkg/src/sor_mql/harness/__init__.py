"""
实验编排：单次运行、w 扫描、CSV 读写、绘图与性质检查
"""

from .io import (
    FINGERPRINT_PREFIX,
    check_output,
    read_columns,
    read_csv,
    read_fingerprint,
    read_payoff_csv,
    write_csv,
    write_dict_rows,
    write_json,
    write_jsonl,
)
from .plot import emit_plot, series_label
from .runs import (
    ALGORITHMS,
    METRIC_NAMES,
    PRIMARY_CSV,
    build_model,
    metric_from_csv,
    run_algorithm,
    run_deep,
    run_linear_fa,
    run_tabular_ql,
    run_tabular_vi,
)
from .sweep import ExperimentConfig, RunSummary, SweepResult, read_summary, run_sweep, summarize, summarize_from_csv
from .validate import PropertyResult, validate_suite

__all__ = [
    "ALGORITHMS",
    "ExperimentConfig",
    "FINGERPRINT_PREFIX",
    "METRIC_NAMES",
    "PRIMARY_CSV",
    "PropertyResult",
    "RunSummary",
    "SweepResult",
    "build_model",
    "check_output",
    "emit_plot",
    "metric_from_csv",
    "read_columns",
    "read_csv",
    "read_fingerprint",
    "read_payoff_csv",
    "read_summary",
    "run_algorithm",
    "run_deep",
    "run_linear_fa",
    "run_sweep",
    "run_tabular_ql",
    "run_tabular_vi",
    "series_label",
    "summarize",
    "summarize_from_csv",
    "validate_suite",
    "write_csv",
    "write_dict_rows",
    "write_json",
    "write_jsonl",
]
