"""Cross-entropy on softmax outputs."""

from typing import Tuple

import numpy as np

from config.logging_config import get_netcore_logger
from ..errors import DataError, DimensionError

logger = get_netcore_logger()

LOG_CLAMP = 1e-12
ROW_SUM_TOLERANCE = 1e-6


def one_hot(targets: np.ndarray, n_classes: int) -> np.ndarray:
    targets = np.asarray(targets, dtype=np.int64)
    if targets.size and (targets.min() < 0 or targets.max() >= n_classes):
        raise DataError(f"targets must lie in [0, {n_classes})")
    out = np.zeros((len(targets), n_classes), dtype=np.float64)
    out[np.arange(len(targets)), targets] = 1.0
    return out


def cross_entropy(probs: np.ndarray, targets: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Mean negative log-likelihood of the true class.

    Args:
        probs: N×K softmax outputs; rows sum to 1.
        targets: N class indices or an N×K one-hot matrix.

    Returns:
        (loss, gradient w.r.t. the pre-softmax logits) where the gradient is
        (probs − one_hot) / N.
    """
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 2:
        raise DimensionError(f"probs must be N×K, got shape {probs.shape}")
    n, k = probs.shape
    if n == 0:
        raise DimensionError("cross_entropy needs a non-empty batch")
    if np.any(np.abs(probs.sum(axis=1) - 1.0) > ROW_SUM_TOLERANCE):
        raise DataError("probability rows must sum to 1")

    targets = np.asarray(targets)
    if targets.ndim == 2:
        if targets.shape != probs.shape:
            raise DimensionError(f"one-hot targets shape {targets.shape} does not match probs {probs.shape}")
        target_matrix = targets.astype(np.float64)
    else:
        if len(targets) != n:
            raise DimensionError(f"{len(targets)} targets for a batch of {n}")
        target_matrix = one_hot(targets, k)

    p_true = (probs * target_matrix).sum(axis=1)
    clamped = p_true < LOG_CLAMP
    if np.any(clamped):
        logger.warning(f"cross_entropy: clamped {int(clamped.sum())} true-class probabilities at {LOG_CLAMP}")
    loss = float(-np.mean(np.log(np.maximum(p_true, LOG_CLAMP))))
    grad = (probs - target_matrix) / n
    return loss, grad
