"""Recording ingestion: the CSV format, validation, and profile-driven loading."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config.logging_config import get_pipeline_logger
from ..errors import DataError, SchemaError

logger = get_pipeline_logger()

BASE_COLUMNS = ("subject_id", "timestamp_ms", "label")
RATE_TOLERANCE = 0.01


def channel_columns(n_channels: int) -> List[str]:
    """Default channel column names ``ch_0 .. ch_{C-1}``."""
    return [f"ch_{i}" for i in range(n_channels)]


@dataclass(frozen=True)
class SensorRecording:
    """
    One subject's multichannel time series with per-timestep labels.

    ``values`` is T×C in the order of ``channel_names``. Arrays are made
    read-only on construction; derive new recordings instead of mutating.
    """
    subject_id: str
    sample_rate_hz: float
    channel_names: Tuple[str, ...]
    values: np.ndarray
    timestamps_ms: np.ndarray
    labels: np.ndarray
    n_classes: int
    metadata: Dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        timestamps = np.array(self.timestamps_ms, dtype=np.float64)
        labels = np.array(self.labels, dtype=np.int64)
        if values.ndim == 1:
            values = values[:, None]
        object.__setattr__(self, "subject_id", str(self.subject_id))
        object.__setattr__(self, "channel_names", tuple(self.channel_names))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "timestamps_ms", timestamps)
        object.__setattr__(self, "labels", labels)
        for arr in (values, timestamps, labels):
            arr.setflags(write=False)
        self._validate()

    def _validate(self) -> None:
        T = len(self.timestamps_ms)
        if self.sample_rate_hz <= 0:
            raise DataError(f"Subject {self.subject_id}: sample rate must be positive, got {self.sample_rate_hz}")
        if self.values.shape != (T, len(self.channel_names)):
            raise DataError(
                f"Subject {self.subject_id}: values shape {self.values.shape} does not match "
                f"{T} timestamps x {len(self.channel_names)} channels"
            )
        if len(self.labels) != T:
            raise DataError(f"Subject {self.subject_id}: {len(self.labels)} labels for {T} timestamps")
        if T > 1 and np.any(np.diff(self.timestamps_ms) < 0):
            raise DataError(f"Subject {self.subject_id}: timestamps are not monotone non-decreasing")
        if T and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise DataError(
                f"Subject {self.subject_id}: labels must lie in [0, {self.n_classes}), "
                f"found range [{self.labels.min()}, {self.labels.max()}]"
            )
        if T > 1:
            mean_delta = (self.timestamps_ms[-1] - self.timestamps_ms[0]) / (T - 1)
            expected = 1000.0 / self.sample_rate_hz
            if abs(mean_delta - expected) > RATE_TOLERANCE * expected:
                raise DataError(
                    f"Subject {self.subject_id}: mean timestamp delta {mean_delta:.4f} ms disagrees "
                    f"with sample rate {self.sample_rate_hz} Hz (expected {expected:.4f} ms)"
                )

    @property
    def n_timesteps(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_channels(self) -> int:
        return int(self.values.shape[1])

    @property
    def channels(self) -> Dict[str, np.ndarray]:
        """Mapping of channel name to its signal stream."""
        return {name: self.values[:, i] for i, name in enumerate(self.channel_names)}


def validate_columns(df: pd.DataFrame, channel_names: Sequence[str]) -> List[str]:
    """Return the required columns missing from ``df``."""
    required = list(BASE_COLUMNS) + list(channel_names)
    return [col for col in required if col not in df.columns]


def infer_channel_names(df: pd.DataFrame) -> List[str]:
    """Channel columns ``ch_<i>`` present in the frame, ordered by index."""
    found = []
    for col in df.columns:
        if col.startswith("ch_") and col[3:].isdigit():
            found.append((int(col[3:]), col))
    return [name for _, name in sorted(found)]


def infer_sample_rate(timestamps_ms: np.ndarray) -> float:
    """Sample rate from the median timestamp delta."""
    deltas = np.diff(np.asarray(timestamps_ms, dtype=np.float64))
    deltas = deltas[deltas > 0]
    if len(deltas) == 0:
        raise DataError("Cannot infer sample rate: fewer than two distinct timestamps")
    return float(1000.0 / np.median(deltas))


def frame_to_recordings(df: pd.DataFrame,
                        channel_names: Optional[Sequence[str]] = None,
                        n_classes: Optional[int] = None,
                        sample_rate_hz: Optional[float] = None) -> List[SensorRecording]:
    """
    Split a long-format frame into one recording per subject.

    Subjects are returned sorted by subject id. Row order within a subject is
    the file order, which must already be monotone in time.
    """
    if channel_names is None:
        channel_names = infer_channel_names(df)
        if not channel_names:
            raise SchemaError("CSV has no channel columns (expected ch_0 .. ch_{C-1})")
    missing = validate_columns(df, channel_names)
    if missing:
        raise SchemaError(f"CSV missing required columns: {missing}", {"missing": missing})

    labels = pd.to_numeric(df["label"], errors="coerce")
    if labels.isna().any() or (labels % 1 != 0).any():
        raise DataError("Label column must contain integer class indices")
    if (labels < 0).any():
        raise DataError("Label column contains negative class indices")
    if n_classes is None:
        n_classes = int(labels.max()) + 1
    elif (labels >= n_classes).any():
        raise DataError(f"Label column contains values >= number of classes {n_classes}")

    work = df.copy()
    work["subject_id"] = work["subject_id"].astype(str)
    recordings: List[SensorRecording] = []
    for subject_id, group in work.groupby("subject_id", sort=True):
        timestamps = group["timestamp_ms"].to_numpy(dtype=np.float64)
        if len(timestamps) > 1 and np.any(np.diff(timestamps) < 0):
            raise DataError(f"Subject {subject_id}: timestamps are not monotone within the file")
        rate = sample_rate_hz if sample_rate_hz is not None else infer_sample_rate(timestamps)
        recordings.append(SensorRecording(
            subject_id=str(subject_id),
            sample_rate_hz=float(rate),
            channel_names=tuple(channel_names),
            values=group[list(channel_names)].to_numpy(dtype=np.float64),
            timestamps_ms=timestamps,
            labels=group["label"].to_numpy(dtype=np.int64),
            n_classes=int(n_classes),
        ))
    logger.info(f"Built {len(recordings)} recordings with {len(channel_names)} channels and {n_classes} classes")
    return recordings


def load_csv(path: Union[str, Path],
             channel_names: Optional[Sequence[str]] = None,
             n_classes: Optional[int] = None,
             sample_rate_hz: Optional[float] = None) -> List[SensorRecording]:
    """
    Load the ingestion CSV (``subject_id,timestamp_ms,label,ch_0,...``).

    Args:
        path: CSV file path.
        channel_names: Expected channel columns; inferred from ``ch_*`` columns when omitted.
        n_classes: Number of classes K; labels must be < K. Inferred as max label + 1 when omitted.
        sample_rate_hz: Nominal rate; inferred from the median timestamp delta when omitted.

    Returns:
        One SensorRecording per subject, sorted by subject id.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"CSV file not found: {path}")
    df = pd.read_csv(path, encoding="utf-8")
    logger.info(f"Loaded CSV {path.name} with {len(df)} rows and {len(df.columns)} columns")
    return frame_to_recordings(df, channel_names, n_classes, sample_rate_hz)


def recordings_to_frame(recordings: Sequence[SensorRecording]) -> pd.DataFrame:
    """Inverse of :func:`frame_to_recordings`: one long frame in ingestion layout."""
    frames = []
    for rec in recordings:
        frame = pd.DataFrame(rec.values, columns=list(rec.channel_names))
        frame.insert(0, "label", rec.labels)
        frame.insert(0, "timestamp_ms", rec.timestamps_ms)
        frame.insert(0, "subject_id", rec.subject_id)
        frames.append(frame)
    if not frames:
        return pd.DataFrame(columns=list(BASE_COLUMNS))
    return pd.concat(frames, ignore_index=True)


def write_csv(recordings: Sequence[SensorRecording], path: Union[str, Path]) -> Path:
    """Write recordings in the ingestion CSV layout."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    recordings_to_frame(recordings).to_csv(path, index=False, encoding="utf-8")
    logger.info(f"Wrote {len(recordings)} recordings to {path}")
    return path


class DataManager:
    """
    Profile-driven loading: read the profile's CSV, validate and clean it,
    bring every subject to the profile's sample rate.
    """

    def __init__(self, profile):
        self.profile = profile
        self.recordings: Optional[List[SensorRecording]] = None

    def load_recordings(self, csv_path: Optional[Union[str, Path]] = None) -> List[SensorRecording]:
        from .resample import resample_recording

        csv_file = Path(csv_path or self.profile.get_csv_file_path())
        if not csv_file.exists():
            raise DataError(f"CSV file not found: {csv_file}")
        df = pd.read_csv(csv_file, encoding="utf-8")
        logger.info(f"Loaded CSV with {len(df)} rows and {len(df.columns)} columns")

        missing = self.profile.validate_columns(df)
        if missing:
            raise SchemaError(f"CSV missing required columns: {missing}", {"missing": missing})
        df = self.profile.clean_data(df)

        recordings = frame_to_recordings(df, self.profile.channel_names, self.profile.n_classes)
        target_rate = self.profile.sample_rate_hz
        out = []
        for rec in recordings:
            if abs(rec.sample_rate_hz - target_rate) > RATE_TOLERANCE * target_rate:
                logger.info(f"Resampling subject {rec.subject_id} from {rec.sample_rate_hz:.2f} Hz to {target_rate} Hz")
                rec = resample_recording(rec, target_rate)
            out.append(rec)
        self.recordings = out
        return out

    def get_recordings(self) -> List[SensorRecording]:
        if self.recordings is None:
            raise ValueError("Data not loaded. Call load_recordings() first.")
        return self.recordings

    def get_stats(self) -> Dict[str, object]:
        """Summary of the loaded recordings."""
        recordings = self.get_recordings()
        return {
            "subjects": [rec.subject_id for rec in recordings],
            "timesteps": {rec.subject_id: rec.n_timesteps for rec in recordings},
            "channels": len(self.profile.channel_names),
            "classes": self.profile.n_classes,
            "class_counts": {
                rec.subject_id: np.bincount(rec.labels, minlength=rec.n_classes).tolist()
                for rec in recordings
            },
        }
