"""Converter from the public DSADS directory layout to the ingestion CSV.

The raw tree is ``<root>/aXX/pY/sZZ.txt``: 19 activities, 8 subjects, 60
five-second segments each, 125 rows × 45 comma-separated columns at 25 Hz
(five units × 9 axes).
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from config.logging_config import get_pipeline_logger
from ..errors import DataError
from .manager import SensorRecording, write_csv
from .resample import resample_recording

logger = get_pipeline_logger()

DSADS_RATE_HZ = 25.0
DSADS_CHANNELS = 45
DSADS_UNITS = ("T", "RA", "LA", "RL", "LL")
DSADS_AXES = ("xacc", "yacc", "zacc", "xgyro", "ygyro", "zgyro", "xmag", "ymag", "zmag")

# The twelve daily activities kept for evaluation, keyed by raw folder
DSADS_ACTIVITIES: Dict[str, str] = {
    "a01": "sitting",
    "a02": "standing",
    "a03": "lying_on_back",
    "a04": "lying_on_right_side",
    "a05": "ascending_stairs",
    "a06": "descending_stairs",
    "a09": "walking",
    "a11": "ascending_ramp",
    "a12": "running",
    "a13": "stepper_exercise",
    "a14": "cross_trainer_exercise",
    "a18": "jumping",
}


def dsads_channel_names() -> List[str]:
    return [f"ch_{i}" for i in range(DSADS_CHANNELS)]


def _read_segment(path: Path) -> np.ndarray:
    block = pd.read_csv(path, header=None).to_numpy(dtype=np.float64)
    if block.ndim != 2 or block.shape[1] != DSADS_CHANNELS:
        raise DataError(f"{path}: expected {DSADS_CHANNELS} columns, got shape {block.shape}")
    return block


def convert_dsads(root: Union[str, Path],
                  out_csv: Optional[Union[str, Path]] = None,
                  activities: Optional[Sequence[str]] = None,
                  target_rate_hz: float = 100.0) -> List[SensorRecording]:
    """
    Read the DSADS tree and return one recording per subject.

    Segments are concatenated activity by activity with continuous timestamps,
    labels follow the order of ``activities``, and each subject is resampled
    to ``target_rate_hz``. When ``out_csv`` is given the result is written there.
    """
    root = Path(root)
    activities = list(activities or DSADS_ACTIVITIES.keys())
    if not root.is_dir():
        raise DataError(f"DSADS root not found: {root}")

    subjects = sorted({p.name for a in activities for p in (root / a).glob("p*") if p.is_dir()},
                      key=lambda name: int(name[1:]) if name[1:].isdigit() else name)
    if not subjects:
        raise DataError(f"No subject folders found under {root}")

    dt_ms = 1000.0 / DSADS_RATE_HZ
    recordings = []
    for subject in subjects:
        blocks, labels = [], []
        for label, activity in enumerate(activities):
            segment_dir = root / activity / subject
            for segment in sorted(segment_dir.glob("s*.txt")):
                block = _read_segment(segment)
                blocks.append(block)
                labels.append(np.full(len(block), label, dtype=np.int64))
        if not blocks:
            logger.warning(f"DSADS subject {subject} has no segments for the selected activities")
            continue
        values = np.concatenate(blocks)
        raw = SensorRecording(
            subject_id=subject,
            sample_rate_hz=DSADS_RATE_HZ,
            channel_names=tuple(dsads_channel_names()),
            values=values,
            timestamps_ms=np.arange(len(values), dtype=np.float64) * dt_ms,
            labels=np.concatenate(labels),
            n_classes=len(activities),
            metadata={"source": "dsads"},
        )
        recordings.append(resample_recording(raw, target_rate_hz) if target_rate_hz != DSADS_RATE_HZ else raw)
        logger.info(f"DSADS subject {subject}: {len(values)} raw timesteps")

    if out_csv is not None:
        write_csv(recordings, out_csv)
    return recordings
