"""Benchmark report emission: schema-versioned JSON plus a comparison table."""

import json
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import pandas as pd

from config.logging_config import get_pipeline_logger
from ..errors import ActiveSelfError
from ..pipeline.snapshot import SCHEMA_VERSION
from .benchmark import SOURCE_ONLY, BenchmarkReport

logger = get_pipeline_logger()

REPORT_FILE = "report.json"
TABLE_FILE = "table.csv"
TABLE_COLUMNS = ["method", "time_cost_min", "labeled_pct", "mean_accuracy", "std_accuracy",
                 "reference_labeled_pct", "reference_accuracy"]
METHOD_NAMES = {
    SOURCE_ONLY: "Source only",
    "sub_ust": "Sub-UST",
    "sub_slss": "Sub-SLSS",
    "activeself": "ActiveSelf",
    "fullft": "Fine-tuning (all target train)",
}


class ReportWriteError(ActiveSelfError, OSError):
    """The report could not be written."""


def report_payload(report: BenchmarkReport, include_timing: bool = True) -> Dict[str, Any]:
    return {"schema_version": SCHEMA_VERSION, **report.to_dict(include_timing)}


def build_table(payload: Mapping[str, Any],
                reference: Optional[Mapping[str, Mapping[str, float]]] = None) -> pd.DataFrame:
    """
    One row per method: time cost in minutes, labeled percentage, mean and
    std accuracy, plus the externally reported values when supplied.
    """
    reference = reference or {}
    rows = []
    for method, s in payload.get("summary", {}).items():
        ref = reference.get(method, {})
        rows.append({
            "method": METHOD_NAMES.get(method, method),
            "time_cost_min": s.get("mean_minutes"),
            "labeled_pct": s["mean_labeled_percentage"],
            "mean_accuracy": s["mean_accuracy"],
            "std_accuracy": s["std_accuracy"],
            "reference_labeled_pct": ref.get("labeled_percentage"),
            "reference_accuracy": ref.get("accuracy"),
        })
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)


def format_table(table: pd.DataFrame) -> str:
    if table.empty:
        return "(no completed folds)"
    return table.to_string(index=False, float_format=lambda v: f"{v:.2f}", na_rep="-")


def emit_report(report: BenchmarkReport,
                out_dir: Union[str, Path],
                reference: Optional[Mapping[str, Mapping[str, float]]] = None) -> Tuple[Path, str]:
    """
    Write ``report.json`` and ``table.csv`` into ``out_dir``.

    Returns:
        (path of the JSON report, the table as printable text)
    """
    out = Path(out_dir)
    payload = report_payload(report)
    table = build_table(payload, reference)
    try:
        out.mkdir(parents=True, exist_ok=True)
        json_path = out / REPORT_FILE
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        table.to_csv(out / TABLE_FILE, index=False, encoding="utf-8")
    except OSError as e:
        raise ReportWriteError(f"Failed to write report to {out}: {e}") from e
    logger.info(f"Report written to {json_path} ({len(report.folds)} folds)")
    return json_path, format_table(table)


def load_report(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
