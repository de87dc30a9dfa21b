"""Resampling recordings to a common rate."""

import numpy as np

from ..errors import DataError
from .manager import SensorRecording


def resample_recording(rec: SensorRecording, target_rate_hz: float) -> SensorRecording:
    """
    Resample onto a uniform grid at ``target_rate_hz``.

    Channels are linearly interpolated; labels take the value of the nearest
    source timestep (earlier one on an exact tie), so a label boundary moves by
    at most one output timestep.
    """
    if target_rate_hz <= 0:
        raise DataError(f"Target sample rate must be positive, got {target_rate_hz}")
    src_t = rec.timestamps_ms
    if len(src_t) < 2:
        raise DataError(f"Subject {rec.subject_id}: need at least two timesteps to resample")

    step = 1000.0 / target_rate_hz
    count = int(np.floor((src_t[-1] - src_t[0]) / step + 1e-9)) + 1
    new_t = src_t[0] + step * np.arange(count, dtype=np.float64)

    values = np.empty((count, rec.n_channels), dtype=np.float64)
    for c in range(rec.n_channels):
        values[:, c] = np.interp(new_t, src_t, rec.values[:, c])

    right = np.clip(np.searchsorted(src_t, new_t, side="left"), 0, len(src_t) - 1)
    left = np.clip(right - 1, 0, len(src_t) - 1)
    take_left = np.abs(new_t - src_t[left]) <= np.abs(src_t[right] - new_t)
    nearest = np.where(take_left, left, right)

    return SensorRecording(
        subject_id=rec.subject_id,
        sample_rate_hz=float(target_rate_hz),
        channel_names=rec.channel_names,
        values=values,
        timestamps_ms=new_t,
        labels=rec.labels[nearest],
        n_classes=rec.n_classes,
        metadata=dict(rec.metadata, resampled_from_hz=str(rec.sample_rate_hz)),
    )
