"""Leave-one-subject-out splits with contiguous-block target partitioning."""

from dataclasses import dataclass
from typing import Dict

import numpy as np

from config.logging_config import get_pipeline_logger
from ..errors import ConfigError, DataError, LookupFailure
from ..utils.seeding import make_rng
from .windowing import WindowSet

logger = get_pipeline_logger()


@dataclass
class SplitSpec:
    """
    Which subject is the target and how its windows are divided.

    Target windows go to train:test in the ratio train_parts:test_parts (3:4).
    Each activity's windows, in time order, are cut into ``blocks_per_class``
    contiguous blocks, and whole blocks are assigned to one side.
    """
    target_subject: str = ""
    train_parts: int = 3
    test_parts: int = 4
    seed: int = 0
    blocks_per_class: int = 7
    purge_overlap: bool = False

    def __post_init__(self):
        self.target_subject = str(self.target_subject)
        if self.train_parts <= 0 or self.test_parts <= 0:
            raise ConfigError("train_parts and test_parts must be positive")
        if self.blocks_per_class < 2:
            raise ConfigError("blocks_per_class must be at least 2")

    @property
    def train_fraction(self) -> float:
        return self.train_parts / (self.train_parts + self.test_parts)

    @property
    def test_fraction(self) -> float:
        return self.test_parts / (self.train_parts + self.test_parts)


@dataclass
class LosoSplit:
    """Pretraining windows plus the target subject's train and test windows."""
    pretrain: WindowSet
    target_train: WindowSet
    target_test: WindowSet
    target_subject: str

    @property
    def target_total(self) -> int:
        return len(self.target_train) + len(self.target_test)

    def summary(self) -> Dict[str, int]:
        return {
            "pretrain": len(self.pretrain),
            "target_train": len(self.target_train),
            "target_test": len(self.target_test),
        }


def _block_assignment(order: np.ndarray, spec: SplitSpec, rng: np.random.Generator) -> np.ndarray:
    """Boolean mask over ``order`` marking train membership."""
    blocks = np.array_split(np.arange(len(order)), spec.blocks_per_class)
    n_train_blocks = int(round(spec.blocks_per_class * spec.train_fraction))
    n_train_blocks = min(max(n_train_blocks, 1), spec.blocks_per_class - 1)
    chosen = rng.permutation(spec.blocks_per_class)[:n_train_blocks]
    mask = np.zeros(len(order), dtype=bool)
    for b in chosen:
        mask[blocks[b]] = True
    return mask


def loso_split(windows: WindowSet, spec: SplitSpec) -> LosoSplit:
    """
    Split all subjects' windows for one leave-one-subject-out fold.

    Args:
        windows: Windows of every subject.
        spec: Target subject, ratio and seed.

    Returns:
        LosoSplit with pretrain = every non-target window, and the target's
        windows partitioned by contiguous time blocks per activity.
    """
    subjects = windows.subjects()
    if len(subjects) < 2:
        raise DataError(f"Leave-one-subject-out needs at least 2 subjects, found {len(subjects)}")
    if spec.target_subject not in subjects:
        raise LookupFailure(f"Unknown target subject '{spec.target_subject}'. Available subjects: {subjects}")

    is_target = windows.subject_ids.astype(str) == spec.target_subject
    pretrain_idx = np.flatnonzero(~is_target)
    target_idx = np.flatnonzero(is_target)

    rng = make_rng(spec.seed, "loso-split", spec.target_subject)
    train_parts, test_parts = [], []
    target_labels = windows.labels[target_idx]
    for k in range(windows.n_classes):
        cls_idx = target_idx[target_labels == k]
        if len(cls_idx) == 0:
            continue
        order = cls_idx[np.argsort(windows.starts[cls_idx], kind="stable")]
        mask = _block_assignment(order, spec, rng)
        train_parts.append(order[mask])
        test_parts.append(order[~mask])

    train_idx = np.sort(np.concatenate(train_parts)) if train_parts else np.empty(0, dtype=np.int64)
    test_idx = np.sort(np.concatenate(test_parts)) if test_parts else np.empty(0, dtype=np.int64)

    if spec.purge_overlap and len(train_idx) and len(test_idx):
        L = windows.window_length
        train_starts = np.sort(windows.starts[train_idx])
        test_starts = windows.starts[test_idx]
        # A test window [t, t+L) overlaps a train window [u, u+L) iff |t − u| < L
        pos = np.searchsorted(train_starts, test_starts)
        lo = np.abs(test_starts - train_starts[np.clip(pos - 1, 0, len(train_starts) - 1)])
        hi = np.abs(train_starts[np.clip(pos, 0, len(train_starts) - 1)] - test_starts)
        keep = np.minimum(lo, hi) >= L
        logger.info(f"Purged {int((~keep).sum())} test windows overlapping train windows")
        test_idx = test_idx[keep]

    split = LosoSplit(
        pretrain=windows.subset(pretrain_idx),
        target_train=windows.subset(train_idx),
        target_test=windows.subset(test_idx),
        target_subject=spec.target_subject,
    )
    logger.info(f"LOSO split for target {spec.target_subject}: {split.summary()}")
    return split
