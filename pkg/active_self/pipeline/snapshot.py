"""Iteration snapshots and the per-run adaptation report."""

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

SCHEMA_VERSION = 1
# Wall-clock fields; everything else in a snapshot is a pure function of (config, seeds, data)
TIMING_KEYS = ("timings",)


@dataclass
class IterationSnapshot:
    """Everything one iteration decided, enough to audit or replay it."""
    iteration: int
    variant: str
    threshold: float
    self_training_size: int = 0
    self_training_per_class: List[int] = field(default_factory=list)
    center_source: str = "none"
    centers: Optional[Dict[str, Any]] = None
    pca: Optional[Dict[str, Any]] = None
    new_queries: int = 0
    core_per_category: Dict[str, int] = field(default_factory=dict)
    augmented: Optional[Dict[str, Any]] = None
    pool_size: int = 0
    pool_composition: Dict[str, int] = field(default_factory=dict)
    pool_indices: List[int] = field(default_factory=list)
    selection_indices: List[int] = field(default_factory=list)
    ledger: Dict[str, Any] = field(default_factory=dict)
    cumulative_queries: int = 0
    labeled_percentage: float = 0.0
    test_accuracy: float = 0.0
    fine_tuned: bool = False
    absent_classes: List[int] = field(default_factory=list)
    loss_curve: List[float] = field(default_factory=list)
    teacher_digest: str = ""
    student_digest: str = ""
    feature_digest: str = ""
    phase_order: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    flags: List[str] = field(default_factory=list)

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data = asdict(self)
        if not include_timing:
            for key in TIMING_KEYS:
                data.pop(key, None)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IterationSnapshot":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


@dataclass
class AdaptationReport:
    """Per-iteration outcome of one adaptation run on one target subject."""
    target_subject: str
    variant: str
    config: Dict[str, Any]
    n_train: int
    n_test: int
    source_accuracy: float
    iterations: List[IterationSnapshot] = field(default_factory=list)
    final_digest: str = ""
    flags: List[str] = field(default_factory=list)

    @property
    def n_total(self) -> int:
        return self.n_train + self.n_test

    @property
    def accuracy_curve(self) -> List[float]:
        return [s.test_accuracy for s in self.iterations]

    @property
    def final_accuracy(self) -> float:
        return self.iterations[-1].test_accuracy if self.iterations else self.source_accuracy

    @property
    def cumulative_queries(self) -> List[int]:
        return [s.cumulative_queries for s in self.iterations]

    @property
    def labeled_percentages(self) -> List[float]:
        return [s.labeled_percentage for s in self.iterations]

    def phase_seconds(self) -> Dict[str, float]:
        totals: Dict[str, float] = {}
        for snap in self.iterations:
            for name, value in snap.timings.items():
                totals[name] = totals.get(name, 0.0) + value
        return totals

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "target_subject": self.target_subject,
            "variant": self.variant,
            "config": self.config,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "n_total": self.n_total,
            "source_accuracy": self.source_accuracy,
            "accuracy_curve": self.accuracy_curve,
            "final_accuracy": self.final_accuracy,
            "cumulative_queries": self.cumulative_queries,
            "labeled_percentages": self.labeled_percentages,
            "final_digest": self.final_digest,
            "flags": list(self.flags),
            "iterations": [s.to_dict(include_timing) for s in self.iterations],
        }
        if include_timing:
            data["phase_seconds"] = self.phase_seconds()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AdaptationReport":
        return cls(
            target_subject=data["target_subject"],
            variant=data["variant"],
            config=data["config"],
            n_train=data["n_train"],
            n_test=data["n_test"],
            source_accuracy=data["source_accuracy"],
            iterations=[IterationSnapshot.from_dict(s) for s in data.get("iterations", [])],
            final_digest=data.get("final_digest", ""),
            flags=list(data.get("flags", [])),
        )


def write_json(payload: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return path


def write_snapshot(snapshot: IterationSnapshot, out_dir: Union[str, Path], prefix: str = "") -> Path:
    body = {"schema_version": SCHEMA_VERSION, **snapshot.to_dict()}
    return write_json(body, Path(out_dir) / f"{prefix}iteration_{snapshot.iteration:02d}.json")
