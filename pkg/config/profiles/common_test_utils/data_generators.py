"""Test data generation utilities.

This module builds small recordings, window sets, embeddings and prediction
batches with known structure, so tests can assert exact outcomes.
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from active_self.classifier import PredictionBatch
from active_self.data import (
    SensorRecording,
    SynthConfig,
    WindowSet,
    channel_columns,
    segment_all,
    synth_generate,
    write_csv,
)
from active_self.netcore import Network


def make_recording(subject_id: str = "S01",
                   n_steps: int = 200,
                   n_channels: int = 3,
                   n_classes: int = 2,
                   sample_rate_hz: float = 100.0,
                   labels: Optional[Sequence[int]] = None,
                   seed: int = 0) -> SensorRecording:
    """Random-valued recording; labels default to contiguous equal bouts per class.

    Args:
        subject_id: Subject identifier
        n_steps: Number of timesteps T
        n_channels: Number of channels C
        n_classes: Number of classes K
        sample_rate_hz: Nominal rate; timestamps are spaced exactly 1000/rate ms
        labels: Per-timestep labels; generated when omitted
        seed: Seed for the channel values

    Returns:
        SensorRecording: The generated recording
    """
    rng = np.random.default_rng(seed)
    if labels is None:
        labels = np.repeat(np.arange(n_classes), int(np.ceil(n_steps / n_classes)))[:n_steps]
    return SensorRecording(
        subject_id=subject_id,
        sample_rate_hz=sample_rate_hz,
        channel_names=tuple(channel_columns(n_channels)),
        values=rng.normal(size=(n_steps, n_channels)),
        timestamps_ms=np.arange(n_steps, dtype=np.float64) * 1000.0 / sample_rate_hz,
        labels=np.asarray(labels, dtype=np.int64),
        n_classes=n_classes,
    )


def make_window_set(counts: Union[int, Dict[str, int]] = 40,
                    n_channels: int = 2,
                    length: int = 5,
                    n_classes: int = 3,
                    separation: float = 3.0,
                    noise: float = 0.5,
                    stride_ms: float = 30.0,
                    seed: int = 0) -> WindowSet:
    """Window set whose classes differ by a per-class mean, laid out in class bouts.

    Args:
        counts: Windows per subject, or a single count for subject ``S01``
        n_channels: Channels C per window
        length: Timesteps L per window
        n_classes: Number of classes K
        separation: Distance between class means
        noise: Standard deviation of the per-value noise
        stride_ms: Spacing of consecutive window start times
        seed: Seed for the values

    Returns:
        WindowSet: Windows ordered by subject then time
    """
    if isinstance(counts, int):
        counts = {"S01": counts}
    rng = np.random.default_rng(seed)
    means = rng.normal(0.0, separation, size=(n_classes, n_channels, 1))
    parts = []
    for subject, n in sorted(counts.items()):
        labels = np.repeat(np.arange(n_classes), int(np.ceil(n / n_classes)))[:n]
        values = means[labels] + rng.normal(0.0, noise, size=(n, n_channels, length))
        parts.append(WindowSet(
            values=values,
            timestamps_ms=np.arange(n, dtype=np.float64) * stride_ms,
            labels=labels.astype(np.int64),
            subject_ids=np.full(n, subject, dtype=object),
            starts=np.arange(n, dtype=np.int64) * 3,
            n_classes=n_classes,
            sample_rate_hz=100.0,
        ))
    return WindowSet.concat(parts)


def make_synthetic_windows(synth: SynthConfig,
                           window_ms: float = 300.0,
                           stride_ms: float = 30.0) -> WindowSet:
    """Generate synthetic recordings and segment every subject."""
    return segment_all(synth_generate(synth), window_ms, stride_ms)


def write_synthetic_csv(synth: SynthConfig, tmp_path: Path, name: str = "synthetic.csv") -> str:
    """Write the synthetic benchmark for ``synth`` and return the CSV path."""
    return str(write_csv(synth_generate(synth), Path(tmp_path) / name))


def create_sensor_csv(tmp_path: Path, rows: List[Dict[str, object]], name: str = "sensors.csv") -> str:
    """Write raw rows in the ingestion layout and return the CSV path."""
    path = Path(tmp_path) / name
    pd.DataFrame(rows).to_csv(path, index=False)
    return str(path)


def clustered_coords(n_per_class: int,
                     n_classes: int,
                     seed: int = 0,
                     radius: float = 4.0,
                     spread: float = 0.5) -> Tuple[np.ndarray, np.ndarray]:
    """3-D points in one Gaussian blob per class, classes placed on a circle.

    Returns:
        Tuple of (N×3 coordinates, N class labels), grouped by class
    """
    rng = np.random.default_rng(seed)
    angles = 2 * np.pi * np.arange(n_classes) / n_classes
    centers = np.stack([radius * np.cos(angles), radius * np.sin(angles), np.zeros(n_classes)], axis=1)
    labels = np.repeat(np.arange(n_classes), n_per_class)
    coords = centers[labels] + rng.normal(0.0, spread, size=(len(labels), 3))
    return coords, labels.astype(np.int64)


def prediction_batch(labels: Sequence[int],
                     confidences: Sequence[float],
                     n_classes: int,
                     n_features: int = 4) -> PredictionBatch:
    """PredictionBatch with the given argmax labels and max-probabilities.

    The remaining mass is spread evenly over the other classes, so each
    confidence must be at least 1/K.
    """
    labels = np.asarray(labels, dtype=np.int64)
    conf = np.asarray(confidences, dtype=np.float64)
    rest = (1.0 - conf) / (n_classes - 1)
    probs = np.repeat(rest[:, None], n_classes, axis=1)
    probs[np.arange(len(labels)), labels] = conf
    return PredictionBatch(probs, np.zeros((len(labels), n_features)))


def kink_margin(network: Network, batch: np.ndarray, seed: int = 0) -> float:
    """Smallest distance of the train-mode forward pass from a non-differentiable point.

    ReLU inputs are measured by their magnitude and global max-pool inputs by
    the gap between the two largest values per channel.
    """
    state = {k: v.copy() for k, v in network.state_arrays().items()}
    result = network.forward(batch, mode="train", seed=seed)
    for k, v in network.state_arrays().items():
        v[...] = state[k]
    margin = np.inf
    for i, layer in enumerate(network.layers):
        x = result.activations[i]
        if layer.kind == "relu":
            margin = min(margin, float(np.min(np.abs(x))))
        elif layer.kind == "global_max_pool_1d":
            top = np.sort(x, axis=2)
            margin = min(margin, float(np.min(top[:, :, -1] - top[:, :, -2])))
    return margin


def smooth_batch(network: Network,
                 batch_size: int,
                 seed: int,
                 margin: float = 1e-2,
                 max_tries: int = 200) -> np.ndarray:
    """Draw standard-normal batches until one keeps every kink at least ``margin`` away.

    Raises:
        RuntimeError: no batch qualified within ``max_tries`` draws
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        batch = rng.normal(size=(batch_size,) + network.input_shape)
        if kink_margin(network, batch, seed) >= margin:
            return batch
    raise RuntimeError(f"no batch with kink margin {margin} in {max_tries} draws")
