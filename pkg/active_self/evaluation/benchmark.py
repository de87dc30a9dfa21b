"""Leave-one-subject-out benchmark over adaptation variants."""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from config.logging_config import get_pipeline_logger
from ..classifier import ArchitectureConfig, HarModel, TrainConfig, build, predict, pretrain
from ..data.splits import LosoSplit, SplitSpec, loso_split
from ..data.windowing import WindowSet
from ..errors import ConfigError, DataError
from ..pipeline.run_config import ABLATION_VARIANTS, VARIANTS, RunConfig
from ..pipeline.snapshot import AdaptationReport
from ..utils.seeding import derive_seed
from .metrics import ConfusionMatrix, metrics

logger = get_pipeline_logger()

SOURCE_ONLY = "source_only"


@dataclass
class BenchmarkSpec:
    """What to run in every fold."""
    architecture: ArchitectureConfig
    train: TrainConfig = field(default_factory=TrainConfig)
    run: RunConfig = field(default_factory=RunConfig)
    split: SplitSpec = field(default_factory=SplitSpec)
    variants: Sequence[str] = ABLATION_VARIANTS
    include_fullft: bool = True
    subjects: Optional[Sequence[str]] = None
    seed: int = 0

    def __post_init__(self):
        for v in self.variants:
            if v not in VARIANTS or v == "fullft":
                raise ConfigError(f"benchmark variants must be among {list(ABLATION_VARIANTS)}, got '{v}'")

    def all_variants(self) -> List[str]:
        return list(self.variants) + (["fullft"] if self.include_fullft else [])


@dataclass
class FoldResult:
    target_subject: str
    source_accuracy: float = 0.0
    pretrain_loss: List[float] = field(default_factory=list)
    reports: Dict[str, AdaptationReport] = field(default_factory=dict)
    class_metrics: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    seconds: Dict[str, float] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "target_subject": self.target_subject,
            "source_accuracy": self.source_accuracy,
            "pretrain_loss": list(self.pretrain_loss),
            "variants": {v: r.to_dict(include_timing) for v, r in self.reports.items()},
            "class_metrics": self.class_metrics,
            "error": self.error,
        }
        if include_timing:
            data["seconds"] = dict(self.seconds)
        return data


@dataclass
class VariantSummary:
    mean_accuracy: float
    std_accuracy: float
    mean_accuracy_per_iteration: List[float]
    mean_labeled_percentage: float
    mean_queries: float
    mean_minutes: float
    folds: int

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data = dict(self.__dict__)
        if not include_timing:
            data.pop("mean_minutes")
        return data


@dataclass
class BenchmarkReport:
    folds: List[FoldResult] = field(default_factory=list)
    spec: Dict[str, Any] = field(default_factory=dict)

    def successful(self) -> List[FoldResult]:
        return [f for f in self.folds if f.ok]

    def summary(self) -> Dict[str, VariantSummary]:
        """Mean and population standard deviation of final accuracy per method over successful folds."""
        folds = self.successful()
        out: Dict[str, VariantSummary] = {}
        if not folds:
            return out
        source = np.array([f.source_accuracy for f in folds])
        out[SOURCE_ONLY] = VariantSummary(
            mean_accuracy=float(source.mean()), std_accuracy=float(source.std()),
            mean_accuracy_per_iteration=[], mean_labeled_percentage=0.0,
            mean_queries=0.0, mean_minutes=float(np.mean([f.seconds.get("pretrain", 0.0) for f in folds]) / 60.0),
            folds=len(folds),
        )
        variants = sorted({v for f in folds for v in f.reports}, key=lambda v: VARIANTS.index(v))
        for variant in variants:
            reports = [f.reports[variant] for f in folds if variant in f.reports]
            final = np.array([r.final_accuracy for r in reports])
            curves = np.array([r.accuracy_curve for r in reports])
            out[variant] = VariantSummary(
                mean_accuracy=float(final.mean()),
                std_accuracy=float(final.std()),
                mean_accuracy_per_iteration=curves.mean(axis=0).tolist() if curves.size else [],
                mean_labeled_percentage=float(np.mean([r.labeled_percentages[-1] if r.iterations else 0.0 for r in reports])),
                mean_queries=float(np.mean([r.cumulative_queries[-1] if r.iterations else 0 for r in reports])),
                mean_minutes=float(np.mean([sum(r.phase_seconds().values()) for r in reports]) / 60.0),
                folds=len(reports),
            )
        return out

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        return {
            "spec": self.spec,
            "summary": {k: v.to_dict(include_timing) for k, v in self.summary().items()},
            "folds": [f.to_dict(include_timing) for f in self.folds],
        }


def _class_metrics(model: HarModel, test: WindowSet) -> Dict[str, Any]:
    if len(test) == 0:
        return {}
    cm = ConfusionMatrix.from_labels(test.labels, predict(model, test).labels, test.n_classes)
    return {**metrics(cm).to_dict(), "confusion": cm.counts.tolist()}


def fold_split(windows: WindowSet, split: SplitSpec, root_seed: int, target: str) -> LosoSplit:
    """The split of one fold; its seed depends only on (root seed, target)."""
    return loso_split(windows, replace(split, target_subject=target, seed=derive_seed(root_seed, "split", target)))


def run_fold(windows: WindowSet, spec: BenchmarkSpec, target: str) -> FoldResult:
    """Pretrain on the other subjects, then adapt with every requested variant."""
    from ..engine import AdaptationEngine

    fold = FoldResult(target_subject=target)
    split = fold_split(windows, spec.split, spec.seed, target)

    start = time.perf_counter()
    source = build(spec.architecture, seed=derive_seed(spec.seed, "build", target))
    trained = pretrain(
        source, split.pretrain,
        epochs=spec.train.epochs, batch_size=spec.train.batch_size,
        learning_rate=spec.train.learning_rate, seed=derive_seed(spec.seed, "pretrain", target),
    )
    fold.pretrain_loss = trained.loss_curve
    fold.seconds["pretrain"] = time.perf_counter() - start
    fold.class_metrics[SOURCE_ONLY] = _class_metrics(source, split.target_test)
    fold.source_accuracy = fold.class_metrics[SOURCE_ONLY].get("accuracy", 0.0)

    for variant in spec.all_variants():
        run_cfg = spec.run.with_overrides(variant=variant, seed=derive_seed(spec.seed, "adapt", target))
        engine = AdaptationEngine(run_cfg, split.target_train, split.target_test, target_subject=target)
        t0 = time.perf_counter()
        final, report = engine.run_adaptation(source)
        fold.seconds[variant] = time.perf_counter() - t0
        fold.reports[variant] = report
        fold.class_metrics[variant] = _class_metrics(final, split.target_test)
    return fold


def _safe_fold(windows: WindowSet, spec: BenchmarkSpec, target: str) -> FoldResult:
    try:
        return run_fold(windows, spec, target)
    except Exception as e:
        logger.error(f"Fold {target} failed: {e}")
        return FoldResult(target_subject=target, error=f"{type(e).__name__}: {e}")


def loso_evaluate(windows: WindowSet, spec: BenchmarkSpec, jobs: int = 1) -> BenchmarkReport:
    """
    One fold per target subject; folds run in parallel processes when ``jobs`` > 1.

    Results are merged in subject order whatever the completion order, and
    each fold's seeds depend only on (root seed, subject).
    """
    subjects = list(spec.subjects) if spec.subjects else windows.subjects()
    if len(windows.subjects()) < 2:
        raise DataError(f"LOSO needs at least 2 subjects, got {windows.subjects()}")
    unknown = sorted(set(subjects) - set(windows.subjects()))
    if unknown:
        raise ConfigError(f"Unknown target subjects {unknown}")
    logger.info(f"LOSO over {len(subjects)} subjects, variants {spec.all_variants()}, jobs={jobs}")

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_safe_fold, windows, spec, s) for s in subjects]
            folds = [f.result() for f in futures]
    else:
        folds = [_safe_fold(windows, spec, s) for s in subjects]

    report = BenchmarkReport(folds=folds, spec={
        "architecture": spec.architecture.to_dict(),
        "train": dict(spec.train.__dict__),
        "run": spec.run.to_dict(),
        "variants": spec.all_variants(),
        "seed": spec.seed,
    })
    failed = [f.target_subject for f in folds if not f.ok]
    if failed:
        logger.warning(f"{len(failed)} folds failed: {failed}")
    return report


@dataclass
class SweepResult:
    """Benchmark summaries across root seeds."""
    seeds: List[int]
    reports: List[BenchmarkReport]

    def mean_accuracy(self, method: str) -> float:
        values = [r.summary()[method].mean_accuracy for r in self.reports if method in r.summary()]
        return float(np.mean(values)) if values else float("nan")

    def ordering(self, methods: Sequence[str] = ("activeself", "sub_slss", "sub_ust", SOURCE_ONLY)) -> Dict[str, Any]:
        """Whether seed-averaged accuracy is non-increasing along ``methods``."""
        means = {m: self.mean_accuracy(m) for m in methods}
        holds = all(means[a] >= means[b] for a, b in zip(methods[:-1], methods[1:]))
        return {"means": means, "holds": bool(holds)}

    def iteration_gain_count(self, variant: str = "activeself", first: int = 1, last: int = 3) -> int:
        """Seeds whose mean accuracy at iteration ``last`` is at least that at ``first``."""
        count = 0
        for r in self.reports:
            summary = r.summary().get(variant)
            if summary and len(summary.mean_accuracy_per_iteration) >= last:
                curve = summary.mean_accuracy_per_iteration
                count += int(curve[last - 1] >= curve[first - 1])
        return count


def seed_sweep(make_windows: Callable[[int], WindowSet], spec: BenchmarkSpec, seeds: Sequence[int],
               jobs: int = 1) -> SweepResult:
    """Regenerate data and rerun the benchmark for every root seed."""
    reports = []
    for seed in seeds:
        seeded = BenchmarkSpec(
            architecture=spec.architecture, train=spec.train, run=spec.run, split=spec.split,
            variants=spec.variants, include_fullft=spec.include_fullft, subjects=spec.subjects, seed=seed,
        )
        reports.append(loso_evaluate(make_windows(seed), seeded, jobs=jobs))
    return SweepResult(seeds=list(seeds), reports=reports)
