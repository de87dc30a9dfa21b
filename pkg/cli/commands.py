"""Command handlers; each verb maps onto one library operation."""

import argparse
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from active_self.classifier import build, load_model, predict, pretrain, save_model
from active_self.data import DataManager, SynthConfig, WindowSet, segment_all, synth_generate, write_csv
from active_self.engine import AdaptationEngine
from active_self.errors import ConfigError, DimensionError
from active_self.evaluation import (
    accuracy,
    calibrate_shift,
    emit_report,
    fold_split,
    loso_evaluate,
    seed_sweep,
)
from active_self.pipeline import SCHEMA_VERSION, write_json, write_snapshot
from active_self.utils.seeding import derive_seed
from config.logging_config import get_cli_logger
from config.profiles.base_profile import DatasetProfile
from config.settings import Config

logger = get_cli_logger()

SYNTH_CSV = "synthetic.csv"
SOURCE_MODEL = "source_model.npz"
ADAPTED_MODEL = "adapted_model.npz"
ADAPTATION_REPORT = "adaptation_report.json"
PRETRAIN_SUMMARY = "pretrain.json"
SWEEP_FILE = "sweep.json"
CALIBRATION_FILE = "calibration.json"


@dataclass
class CommandResult:
    """Files a command wrote and the derived seeds it used, for the manifest."""
    outputs: Dict[str, str] = field(default_factory=dict)
    seeds: Dict[str, int] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)


Handler = Callable[[argparse.Namespace, Config, DatasetProfile], CommandResult]


def load_windows(profile: DatasetProfile) -> WindowSet:
    """Read the profile's CSV and segment every subject."""
    manager = DataManager(profile)
    recordings = manager.load_recordings()
    windows = segment_all(recordings, profile.window_ms, profile.stride_ms)
    logger.info(f"{len(windows)} windows of shape {windows.input_shape} from {len(recordings)} subjects")
    return windows


def resolve_target(config: Config, windows: WindowSet) -> str:
    """Configured target subject, or the first subject in id order."""
    return config.split.target_subject or windows.subjects()[0]


def synth_gen(args: argparse.Namespace, config: Config, profile: DatasetProfile) -> CommandResult:
    out = Path(config.output_dir)
    synth = config.synth
    outputs = {}
    summary = {"shift_magnitude": synth.shift_magnitude}
    if getattr(args, "calibrate", False):
        def segment(candidate: SynthConfig) -> WindowSet:
            return segment_all(synth_generate(candidate), profile.window_ms, profile.stride_ms)

        spec = replace(config.benchmark_spec(profile, include_fullft=False), subjects=None)
        calibration = calibrate_shift(synth, spec, segment, jobs=config.jobs)
        synth = replace(synth, shift_magnitude=calibration.shift_magnitude)
        outputs["calibration"] = str(write_json(
            {"schema_version": SCHEMA_VERSION, **calibration.to_dict()}, out / CALIBRATION_FILE))
        summary.update(shift_magnitude=calibration.shift_magnitude, source_accuracy=calibration.source_accuracy)
        print(f"Calibrated shift {calibration.shift_magnitude:.4f}: "
              f"source-only accuracy {calibration.source_accuracy:.2f}%")

    path = write_csv(synth_generate(synth), out / SYNTH_CSV)
    outputs["csv"] = str(path)
    print(f"Wrote {synth.n_subjects} synthetic subjects to {path}")
    return CommandResult(outputs=outputs, seeds={"synth": synth.seed}, summary=summary)


def pretrain_source(args: argparse.Namespace, config: Config, profile: DatasetProfile) -> CommandResult:
    out = Path(config.output_dir)
    windows = load_windows(profile)
    target = resolve_target(config, windows)
    split = fold_split(windows, config.split, config.seed, target)
    seeds = {
        "split": derive_seed(config.seed, "split", target),
        "build": derive_seed(config.seed, "build", target),
        "pretrain": derive_seed(config.seed, "pretrain", target),
    }

    model = build(config.architecture_config(profile), seed=seeds["build"])
    result = pretrain(
        model, split.pretrain,
        epochs=config.train.epochs, batch_size=config.train.batch_size,
        learning_rate=config.train.learning_rate, seed=seeds["pretrain"],
    )
    source_accuracy = accuracy(split.target_test.labels, predict(model, split.target_test).labels) \
        if len(split.target_test) else 0.0

    model_path = save_model(model, out / SOURCE_MODEL, metadata={
        "target_subject": target,
        "config_hash": config.config_hash(),
    })
    summary = {
        "schema_version": SCHEMA_VERSION,
        "target_subject": target,
        "split": split.summary(),
        "loss_curve": result.loss_curve,
        "absent_classes": result.absent_classes,
        "source_accuracy": source_accuracy,
    }
    summary_path = write_json(summary, out / PRETRAIN_SUMMARY)
    print(f"Pretrained on {len(split.pretrain)} source windows; "
          f"target {target} source-only accuracy {source_accuracy:.2f}%")
    return CommandResult(
        outputs={"model": str(model_path), "summary": str(summary_path)},
        seeds=seeds,
        summary={"source_accuracy": source_accuracy},
    )


def _adapt(args: argparse.Namespace, config: Config, profile: DatasetProfile,
           variant: Optional[str] = None) -> CommandResult:
    out = Path(config.output_dir)
    model_path = Path(args.model) if getattr(args, "model", None) else out / SOURCE_MODEL
    source, metadata = load_model(model_path)
    target = metadata.get("target_subject", "")
    if config.split.target_subject and config.split.target_subject != target:
        raise ConfigError(
            f"Model {model_path} was pretrained for target '{target}', "
            f"config asks for '{config.split.target_subject}'"
        )

    windows = load_windows(profile)
    if tuple(source.config.input_shape) != tuple(windows.input_shape):
        raise DimensionError(
            f"Model expects windows of shape {tuple(source.config.input_shape)}, data gives {windows.input_shape}"
        )
    split = fold_split(windows, config.split, config.seed, target)
    run_cfg = config.run.with_overrides(variant=variant, seed=derive_seed(config.seed, "adapt", target))

    engine = AdaptationEngine(run_cfg, split.target_train, split.target_test, target_subject=target)
    final, report = engine.run_adaptation(source)

    run_dir = out / run_cfg.variant
    outputs = {}
    for snapshot in report.iterations:
        outputs[f"iteration_{snapshot.iteration}"] = str(write_snapshot(snapshot, run_dir))
    outputs["report"] = str(write_json({"schema_version": SCHEMA_VERSION, **report.to_dict()},
                                       run_dir / ADAPTATION_REPORT))
    outputs["model"] = str(save_model(final, run_dir / ADAPTED_MODEL, metadata={
        "target_subject": target,
        "variant": run_cfg.variant,
        "config_hash": config.config_hash(),
    }))

    queries = report.cumulative_queries[-1] if report.iterations else 0
    labeled = report.labeled_percentages[-1] if report.iterations else 0.0
    print(f"{run_cfg.variant} on {target}: accuracy {report.source_accuracy:.2f}% -> "
          f"{report.final_accuracy:.2f}% with {queries} queries ({labeled:.3f}% labeled)")
    return CommandResult(
        outputs=outputs,
        seeds={"split": derive_seed(config.seed, "split", target), "adapt": run_cfg.seed},
        summary={"final_accuracy": report.final_accuracy, "queries": queries, "final_digest": report.final_digest},
    )


def adapt(args: argparse.Namespace, config: Config, profile: DatasetProfile) -> CommandResult:
    return _adapt(args, config, profile)


def fullft(args: argparse.Namespace, config: Config, profile: DatasetProfile) -> CommandResult:
    return _adapt(args, config, profile, variant="fullft")


def _benchmark(config: Config, profile: DatasetProfile, include_fullft: bool, n_seeds: int = 1) -> CommandResult:
    out = Path(config.output_dir)
    windows = load_windows(profile)
    spec = config.benchmark_spec(profile, include_fullft=include_fullft)
    report = loso_evaluate(windows, spec, jobs=config.jobs)
    json_path, table = emit_report(report, out, profile.reference_results())
    print(table)
    result = CommandResult(outputs={"report": str(json_path)}, seeds={"root": config.seed})

    if n_seeds > 1:
        seeds = [config.seed + i for i in range(n_seeds)]

        def make_windows(seed: int) -> WindowSet:
            if config.profile_name != "synthetic_profile":
                return windows
            regenerated = synth_generate(replace(config.synth, seed=seed))
            return segment_all(regenerated, profile.window_ms, profile.stride_ms)

        sweep = seed_sweep(make_windows, spec, seeds, jobs=config.jobs)
        ordering = sweep.ordering()
        payload = {
            "schema_version": SCHEMA_VERSION,
            "seeds": sweep.seeds,
            "ordering": ordering,
            "iteration_gain_count": sweep.iteration_gain_count(),
            "summaries": [{k: v.to_dict(include_timing=False) for k, v in r.summary().items()}
                          for r in sweep.reports],
        }
        result.outputs["sweep"] = str(write_json(payload, out / SWEEP_FILE))
        print(f"Seed sweep over {n_seeds} seeds: ordering holds = {ordering['holds']}")
    return result


def ablate(args: argparse.Namespace, config: Config, profile: DatasetProfile) -> CommandResult:
    return _benchmark(config, profile, include_fullft=False, n_seeds=getattr(args, "seeds", 1))


def evaluate(args: argparse.Namespace, config: Config, profile: DatasetProfile) -> CommandResult:
    return _benchmark(config, profile, include_fullft=True, n_seeds=getattr(args, "seeds", 1))


def register_commands(subparsers, parents=()) -> None:
    """Attach every verb to the parser with its handler; ``parents`` carry the shared flags."""
    parents = list(parents)
    synth = subparsers.add_parser("synth-gen", parents=parents, help="Generate the synthetic shifted-subject benchmark CSV")
    synth.add_argument("--calibrate", action="store_true",
                       help="First tune the subject shift so source-only LOSO accuracy lies in 60-80%%")
    synth.set_defaults(handler=synth_gen)

    pre = subparsers.add_parser("pretrain", parents=parents, help="Pretrain the source model on every non-target subject")
    pre.set_defaults(handler=pretrain_source)

    for verb, handler, help_text in (
        ("adapt", adapt, "Adapt a pretrained model to its target subject"),
        ("fullft", fullft, "Fine-tune on every labeled target training window (upper bound)"),
    ):
        p = subparsers.add_parser(verb, parents=parents, help=help_text)
        p.add_argument("--model", type=str, default=None,
                       help=f"Source checkpoint (default: <out>/{SOURCE_MODEL})")
        p.set_defaults(handler=handler)

    for verb, handler, help_text in (
        ("ablate", ablate, "LOSO benchmark of activeself, sub_slss and sub_ust"),
        ("evaluate", evaluate, "LOSO benchmark of every variant plus the supervised bound"),
    ):
        p = subparsers.add_parser(verb, parents=parents, help=help_text)
        p.add_argument("--seeds", type=int, default=1,
                       help="Repeat over this many consecutive root seeds (default: 1)")
        p.set_defaults(handler=handler)
