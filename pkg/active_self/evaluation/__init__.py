from .metrics import (
    ClassMetrics,
    ConfusionMatrix,
    MetricsReport,
    accuracy,
    labeled_percentage,
    metrics,
    query_budget,
)
from .benchmark import (
    SOURCE_ONLY,
    BenchmarkReport,
    BenchmarkSpec,
    FoldResult,
    SweepResult,
    VariantSummary,
    fold_split,
    loso_evaluate,
    run_fold,
    seed_sweep,
)
from .calibration import DEFAULT_BAND, ShiftCalibration, calibrate_shift, search_shift, source_only_accuracy
from .report import build_table, emit_report, format_table, load_report, report_payload

__all__ = [
    "ClassMetrics",
    "ConfusionMatrix",
    "MetricsReport",
    "accuracy",
    "labeled_percentage",
    "metrics",
    "query_budget",
    "SOURCE_ONLY",
    "BenchmarkReport",
    "BenchmarkSpec",
    "FoldResult",
    "SweepResult",
    "VariantSummary",
    "fold_split",
    "loso_evaluate",
    "run_fold",
    "seed_sweep",
    "DEFAULT_BAND",
    "ShiftCalibration",
    "calibrate_shift",
    "search_shift",
    "source_only_accuracy",
    "build_table",
    "emit_report",
    "format_table",
    "load_report",
    "report_payload",
]
