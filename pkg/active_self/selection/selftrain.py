"""Confident pseudo-labels and per-class centers in the 3-D embedding."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from config.logging_config import get_pipeline_logger
from ..errors import ConfigError, DataError, DimensionError

logger = get_pipeline_logger()

THRESHOLD_STEP = 0.05
THRESHOLD_CAP = 0.95


@dataclass
class SelfTrainingSet:
    """Target-train indices whose confidence beat the iteration's threshold, with argmax pseudo-labels."""
    indices: np.ndarray
    pseudo_labels: np.ndarray
    confidences: np.ndarray
    iteration: int
    threshold: float

    def __len__(self) -> int:
        return int(len(self.indices))

    def class_counts(self, n_classes: int) -> List[int]:
        return np.bincount(self.pseudo_labels, minlength=n_classes).astype(int).tolist()


@dataclass
class CenterSet:
    """One center per class present in S: class ids ascending, the member's index and its 3-D coordinates."""
    classes: np.ndarray
    indices: np.ndarray
    coords: np.ndarray
    flags: List[str] = field(default_factory=list)

    def __len__(self) -> int:
        return int(len(self.classes))

    def has(self, label: int) -> bool:
        return bool(np.any(self.classes == label))

    def coord_of(self, label: int) -> np.ndarray:
        pos = np.flatnonzero(self.classes == label)
        if len(pos) == 0:
            raise KeyError(label)
        return self.coords[pos[0]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "classes": self.classes.tolist(),
            "indices": self.indices.tolist(),
            "coords": self.coords.tolist(),
            "flags": list(self.flags),
        }

    @classmethod
    def empty(cls) -> "CenterSet":
        return cls(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros((0, 3)))


def threshold_for_iter(base: float, iteration: int) -> float:
    """base + 0.05·(iteration − 1), capped at 0.95."""
    if iteration < 1:
        raise ConfigError(f"iteration is 1-based, got {iteration}")
    if not 0.0 <= base < 1.0:
        raise ConfigError(f"base threshold must be in [0, 1), got {base}")
    return min(round(base + THRESHOLD_STEP * (iteration - 1), 10), THRESHOLD_CAP)


def build_self_training_set(predictions,
                            coords3d: np.ndarray,
                            iteration: int,
                            base_threshold: float,
                            exclude: Optional[Sequence[int]] = None) -> SelfTrainingSet:
    """
    Select windows whose confidence is strictly greater than the threshold.

    Args:
        predictions: PredictionBatch over the target training windows.
        coords3d: N×3 embedding aligned with ``predictions``.
        iteration: 1-based iteration index.
        base_threshold: Threshold at iteration 1.
        exclude: Indices never admitted (already carrying an oracle label).
    """
    if len(predictions) != len(coords3d):
        raise DimensionError(f"{len(predictions)} predictions but {len(coords3d)} coordinates")
    threshold = threshold_for_iter(base_threshold, iteration)
    mask = predictions.confidence > threshold
    if exclude is not None and len(exclude):
        mask[np.asarray(list(exclude), dtype=np.int64)] = False
    indices = np.flatnonzero(mask).astype(np.int64)
    selected = SelfTrainingSet(
        indices=indices,
        pseudo_labels=predictions.labels[indices].astype(np.int64),
        confidences=predictions.confidence[indices].astype(np.float64),
        iteration=iteration,
        threshold=threshold,
    )
    logger.info(f"Iteration {iteration}: threshold {threshold:.2f}, {len(selected)} of {len(mask)} windows self-labelled")
    return selected


def build_center_set(selected: SelfTrainingSet, coords3d: np.ndarray) -> CenterSet:
    """
    Per pseudo-class, the member nearest (Euclidean) to the class centroid.

    Ties go to the lowest index. Classes with no members get no center.
    """
    if len(selected) == 0:
        raise DataError("Cannot build centers from an empty self-training set")
    coords = np.asarray(coords3d, dtype=np.float64)
    classes, center_idx, center_xyz = [], [], []
    for label in np.unique(selected.pseudo_labels):
        members = selected.indices[selected.pseudo_labels == label]
        pts = coords[members]
        centroid = pts.mean(axis=0)
        dist = np.linalg.norm(pts - centroid, axis=1)
        best = members[int(np.argmin(dist))]
        classes.append(int(label))
        center_idx.append(int(best))
        center_xyz.append(coords[best])
    centers = CenterSet(
        classes=np.asarray(classes, dtype=np.int64),
        indices=np.asarray(center_idx, dtype=np.int64),
        coords=np.asarray(center_xyz, dtype=np.float64).reshape(-1, 3),
    )
    logger.debug(f"Centers for classes {classes} at indices {center_idx}")
    return centers
