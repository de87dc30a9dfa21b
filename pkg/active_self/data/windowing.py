"""Sliding-window segmentation of recordings into classifier samples."""

from dataclasses import dataclass
from typing import Iterator, List, Sequence, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from config.logging_config import get_pipeline_logger
from ..errors import ConfigError, DataError, EmptyOutputError
from .manager import SensorRecording

logger = get_pipeline_logger()


@dataclass(frozen=True)
class Window:
    """One analysis segment: C×L values, start time, hidden label, subject."""
    values: np.ndarray
    timestamp_ms: float
    label: int
    subject_id: str


@dataclass
class WindowSet:
    """
    Column-stored collection of windows that behaves as a sequence of Window.

    values: N×C×L, timestamps_ms: N, labels: N, subject_ids: N,
    starts: N timestep offsets of each window within its recording.
    """
    values: np.ndarray
    timestamps_ms: np.ndarray
    labels: np.ndarray
    subject_ids: np.ndarray
    starts: np.ndarray
    n_classes: int
    sample_rate_hz: float

    def __post_init__(self):
        n = len(self.timestamps_ms)
        if self.values.ndim != 3 or self.values.shape[0] != n:
            raise DataError(f"WindowSet values must be N×C×L with N={n}, got {self.values.shape}")
        for name in ("labels", "subject_ids", "starts"):
            if len(getattr(self, name)) != n:
                raise DataError(f"WindowSet field {name} has length {len(getattr(self, name))}, expected {n}")

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def __getitem__(self, index: int) -> Window:
        return Window(
            values=self.values[index],
            timestamp_ms=float(self.timestamps_ms[index]),
            label=int(self.labels[index]),
            subject_id=str(self.subject_ids[index]),
        )

    def __iter__(self) -> Iterator[Window]:
        for i in range(len(self)):
            yield self[i]

    @property
    def input_shape(self):
        return tuple(self.values.shape[1:])

    @property
    def window_length(self) -> int:
        return int(self.values.shape[2])

    def subset(self, indices: Union[Sequence[int], np.ndarray]) -> "WindowSet":
        idx = np.asarray(indices, dtype=np.int64)
        return WindowSet(
            values=self.values[idx],
            timestamps_ms=self.timestamps_ms[idx],
            labels=self.labels[idx],
            subject_ids=self.subject_ids[idx],
            starts=self.starts[idx],
            n_classes=self.n_classes,
            sample_rate_hz=self.sample_rate_hz,
        )

    def subjects(self) -> List[str]:
        return sorted(set(str(s) for s in self.subject_ids))

    @staticmethod
    def concat(sets: Sequence["WindowSet"]) -> "WindowSet":
        if not sets:
            raise EmptyOutputError("Cannot concatenate an empty list of window sets")
        return WindowSet(
            values=np.concatenate([s.values for s in sets], axis=0),
            timestamps_ms=np.concatenate([s.timestamps_ms for s in sets]),
            labels=np.concatenate([s.labels for s in sets]),
            subject_ids=np.concatenate([s.subject_ids for s in sets]),
            starts=np.concatenate([s.starts for s in sets]),
            n_classes=sets[0].n_classes,
            sample_rate_hz=sets[0].sample_rate_hz,
        )


def duration_to_steps(duration_ms: float, sample_rate_hz: float) -> int:
    """round(duration_ms × rate / 1000)."""
    return int(round(duration_ms * sample_rate_hz / 1000.0))


def window_count(n_timesteps: int, window_steps: int, stride_steps: int) -> int:
    """floor((T − L)/s) + 1, or 0 when the recording is shorter than a window."""
    if n_timesteps < window_steps:
        return 0
    return (n_timesteps - window_steps) // stride_steps + 1


def majority_labels(label_windows: np.ndarray, n_classes: int) -> np.ndarray:
    """
    Majority label per row of an N×L label matrix.

    Ties go to the label at the window midpoint (index L // 2) when it is one
    of the tied labels, otherwise to the lowest tied label.
    """
    n, length = label_windows.shape
    counts = np.zeros((n, n_classes), dtype=np.int64)
    for k in range(n_classes):
        counts[:, k] = (label_windows == k).sum(axis=1)
    best = counts.max(axis=1)
    tied = counts == best[:, None]
    labels = np.argmax(counts, axis=1)
    midpoint = label_windows[:, length // 2]
    use_mid = (tied.sum(axis=1) > 1) & tied[np.arange(n), midpoint]
    labels[use_mid] = midpoint[use_mid]
    return labels.astype(np.int64)


def segment_windows(rec: SensorRecording, window_ms: float, stride_ms: float) -> WindowSet:
    """
    Cut a recording into windows at starts 0, s, 2s, ...

    Args:
        rec: Source recording.
        window_ms: Window duration (300 ms by default in the profiles).
        stride_ms: Hop between window starts; must satisfy window_ms >= stride_ms > 0.

    Returns:
        WindowSet with floor((T − L)/s) + 1 windows.
    """
    if not (window_ms >= stride_ms > 0):
        raise ConfigError(f"Require window_ms >= stride_ms > 0, got window={window_ms}, stride={stride_ms}")
    L = duration_to_steps(window_ms, rec.sample_rate_hz)
    s = duration_to_steps(stride_ms, rec.sample_rate_hz)
    if L < 1 or s < 1:
        raise ConfigError(
            f"Window ({window_ms} ms) and stride ({stride_ms} ms) must each span at least one "
            f"timestep at {rec.sample_rate_hz} Hz"
        )
    T = rec.n_timesteps
    count = window_count(T, L, s)
    if count == 0:
        raise EmptyOutputError(
            f"Subject {rec.subject_id}: recording of {T} timesteps is shorter than one window of {L}"
        )

    starts = np.arange(count, dtype=np.int64) * s
    # (T − L + 1, C, L) view, then keep every s-th start
    values = sliding_window_view(rec.values, L, axis=0)[::s][:count]
    label_windows = sliding_window_view(rec.labels, L)[::s][:count]

    windows = WindowSet(
        values=np.ascontiguousarray(values, dtype=np.float64),
        timestamps_ms=rec.timestamps_ms[starts].astype(np.float64),
        labels=majority_labels(label_windows, rec.n_classes),
        subject_ids=np.full(count, rec.subject_id, dtype=object),
        starts=starts,
        n_classes=rec.n_classes,
        sample_rate_hz=rec.sample_rate_hz,
    )
    logger.debug(f"Subject {rec.subject_id}: {count} windows of {L} steps, stride {s}")
    return windows


def segment_all(recordings: Sequence[SensorRecording], window_ms: float, stride_ms: float) -> WindowSet:
    """Segment every recording (in subject-id order) and concatenate."""
    ordered = sorted(recordings, key=lambda r: r.subject_id)
    return WindowSet.concat([segment_windows(rec, window_ms, stride_ms) for rec in ordered])
