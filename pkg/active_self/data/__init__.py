"""Recording ingestion, windowing, splits and synthetic benchmark data."""

from .manager import (
    SensorRecording,
    DataManager,
    load_csv,
    write_csv,
    frame_to_recordings,
    recordings_to_frame,
    channel_columns,
)
from .windowing import Window, WindowSet, segment_windows, segment_all, window_count, majority_labels, duration_to_steps
from .splits import SplitSpec, LosoSplit, loso_split
from .synthetic import SynthConfig, synth_generate
from .resample import resample_recording
from .dsads import convert_dsads, DSADS_ACTIVITIES

__all__ = [
    'SensorRecording',
    'DataManager',
    'load_csv',
    'write_csv',
    'frame_to_recordings',
    'recordings_to_frame',
    'channel_columns',
    'Window',
    'WindowSet',
    'segment_windows',
    'segment_all',
    'window_count',
    'majority_labels',
    'duration_to_steps',
    'SplitSpec',
    'LosoSplit',
    'loso_split',
    'SynthConfig',
    'synth_generate',
    'resample_recording',
    'convert_dsads',
    'DSADS_ACTIVITIES',
]
