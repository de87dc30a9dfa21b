"""Search for the subject-shift magnitude that puts source-only accuracy in a target band."""

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Tuple

from config.logging_config import get_pipeline_logger
from ..data.synthetic import SynthConfig
from ..data.windowing import WindowSet
from ..errors import CalibrationError, ConfigError
from .benchmark import SOURCE_ONLY, BenchmarkSpec, loso_evaluate

logger = get_pipeline_logger()

DEFAULT_BAND = (60.0, 80.0)
MAX_SHIFT = 16.0
MIN_SHIFT = 1e-3
MAX_STEPS = 12


@dataclass
class ShiftCalibration:
    """Chosen shift, its measured source-only accuracy, and every trial in order."""
    shift_magnitude: float
    source_accuracy: float
    band: Tuple[float, float]
    trials: List[Dict[str, float]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "shift_magnitude": self.shift_magnitude,
            "source_accuracy": self.source_accuracy,
            "band": list(self.band),
            "trials": [dict(t) for t in self.trials],
        }


def search_shift(measure: Callable[[float], float],
                 start: float,
                 band: Tuple[float, float] = DEFAULT_BAND,
                 max_steps: int = MAX_STEPS) -> ShiftCalibration:
    """
    Bracket then bisect the shift until ``measure(shift)`` lands inside ``band``.

    ``measure`` is treated as decreasing in the shift: above the band means
    the shift must grow. The bracket doubles (or halves) from ``start``
    before bisection; every call counts against ``max_steps``.

    Raises:
        ConfigError: empty band or non-positive step allowance.
        CalibrationError: the band was not reached within ``max_steps`` calls
            or the bracket left [0, MAX_SHIFT].
    """
    low_acc, high_acc = band
    if not 0.0 <= low_acc < high_acc <= 100.0:
        raise ConfigError(f"accuracy band must satisfy 0 <= low < high <= 100, got {band}")
    if max_steps < 1:
        raise ConfigError(f"max_steps must be at least 1, got {max_steps}")

    trials: List[Dict[str, float]] = []

    def trial(shift: float) -> float:
        if len(trials) >= max_steps:
            raise CalibrationError(
                f"source-only accuracy not inside {list(band)} after {max_steps} trials: {trials}")
        acc = float(measure(shift))
        trials.append({"shift_magnitude": shift, "source_accuracy": acc})
        logger.info(f"Calibration trial {len(trials)}: shift {shift:.4f} -> source-only {acc:.2f}%")
        return acc

    def done(shift: float, acc: float) -> ShiftCalibration:
        logger.info(f"Calibrated shift {shift:.4f}: source-only {acc:.2f}% in {list(band)} after {len(trials)} trials")
        return ShiftCalibration(shift_magnitude=shift, source_accuracy=acc, band=(low_acc, high_acc), trials=trials)

    shift = max(float(start), 0.0)
    acc = trial(shift)
    if low_acc <= acc <= high_acc:
        return done(shift, acc)

    if acc > high_acc:
        low = shift
        high = max(2.0 * shift, 0.5)
        while True:
            acc = trial(high)
            if low_acc <= acc <= high_acc:
                return done(high, acc)
            if acc < low_acc:
                break
            if high >= MAX_SHIFT:
                raise CalibrationError(f"source-only accuracy still above {high_acc}% at shift {high}")
            low, high = high, min(2.0 * high, MAX_SHIFT)
    else:
        if shift == 0.0:
            raise CalibrationError(f"source-only accuracy below {low_acc}% even without subject shift")
        high = shift
        low = shift / 2.0
        while True:
            if low < MIN_SHIFT:
                low = 0.0
            acc = trial(low)
            if low_acc <= acc <= high_acc:
                return done(low, acc)
            if acc > high_acc:
                break
            if low == 0.0:
                raise CalibrationError(f"source-only accuracy below {low_acc}% even without subject shift")
            high, low = low, low / 2.0

    while True:
        mid = (low + high) / 2.0
        acc = trial(mid)
        if low_acc <= acc <= high_acc:
            return done(mid, acc)
        if acc > high_acc:
            low = mid
        else:
            high = mid


def source_only_accuracy(windows: WindowSet, spec: BenchmarkSpec, jobs: int = 1) -> float:
    """Mean LOSO accuracy of the pretrained source models, no adaptation."""
    report = loso_evaluate(windows, replace(spec, variants=(), include_fullft=False), jobs=jobs)
    summary = report.summary()
    if SOURCE_ONLY not in summary:
        raise CalibrationError("every LOSO fold failed while measuring source-only accuracy")
    return summary[SOURCE_ONLY].mean_accuracy


def calibrate_shift(synth: SynthConfig,
                    spec: BenchmarkSpec,
                    segment: Callable[[SynthConfig], WindowSet],
                    band: Tuple[float, float] = DEFAULT_BAND,
                    max_steps: int = MAX_STEPS,
                    jobs: int = 1) -> ShiftCalibration:
    """
    Tune ``synth.shift_magnitude`` so source-only LOSO accuracy lands in ``band``.

    Args:
        synth: Generator settings; only the shift varies, starting from its value.
        spec: Architecture and pretraining schedule of every fold.
        segment: Turns a generator config into windows.
        band: Inclusive accuracy range in percent.
        max_steps: Most LOSO measurements to spend.
        jobs: Parallel folds per measurement.

    Returns:
        ShiftCalibration whose shift reproduces the accuracy with ``synth``'s seed.
    """
    synth.validate()

    def measure(shift: float) -> float:
        return source_only_accuracy(segment(replace(synth, shift_magnitude=shift)), spec, jobs)

    logger.info(f"Calibrating subject shift for {synth.n_classes} classes, {synth.n_subjects} subjects "
                f"into source-only band {list(band)}")
    return search_shift(measure, synth.shift_magnitude, band, max_steps)
