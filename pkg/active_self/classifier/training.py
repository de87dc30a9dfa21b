"""Pretraining on source subjects and frozen-feature fine-tuning on the target pool."""

import copy
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from config.logging_config import get_netcore_logger
from ..data.windowing import WindowSet
from ..errors import ConfigError, DataError
from ..netcore.losses import cross_entropy
from ..netcore.optim import AdamState, adam_step
from ..utils.seeding import derive_seed
from .model import HarModel

logger = get_netcore_logger()

DEFAULT_EPOCHS = 30


@dataclass
class TrainConfig:
    """Pretraining schedule on the source subjects."""
    epochs: int = DEFAULT_EPOCHS
    batch_size: int = 64
    learning_rate: float = 1e-3

    def __post_init__(self):
        _check_schedule(self.epochs, self.batch_size, self.learning_rate)


@dataclass
class TrainingResult:
    """Trained model, mean loss per epoch, and classes with no training samples."""
    model: HarModel
    loss_curve: List[float] = field(default_factory=list)
    absent_classes: List[int] = field(default_factory=list)


def absent_classes(labels: np.ndarray, n_classes: int) -> List[int]:
    counts = np.bincount(np.asarray(labels, dtype=np.int64), minlength=n_classes)
    return [int(k) for k in np.flatnonzero(counts == 0)]


def restrict_to_classes(probs: np.ndarray, present: np.ndarray) -> np.ndarray:
    """
    Renormalize softmax rows over the ``present`` classes only.

    Cross-entropy on the result has zero gradient on the other logits, so a
    class the pool lacks is not pushed down. Rows whose present mass
    underflows become uniform over the present classes.
    """
    mask = np.zeros(probs.shape[1], dtype=np.float64)
    mask[present] = 1.0
    masked = probs * mask
    total = masked.sum(axis=1, keepdims=True)
    underflow = total[:, 0] <= 0.0
    if np.any(underflow):
        masked[underflow] = mask
        total[underflow] = mask.sum()
    return masked / total


def _fit(model: HarModel, x: np.ndarray, y: np.ndarray, epochs: int, batch_size: int,
         seed: int, optimizer: AdamState, present: Optional[np.ndarray] = None) -> List[float]:
    network = model.network
    params = network.parameters()
    decay = network.weight_decay()
    n = len(x)
    curve: List[float] = []
    for epoch in range(epochs):
        order = np.random.default_rng(derive_seed(seed, "shuffle", epoch)).permutation(n)
        total = 0.0
        for b, start in enumerate(range(0, n, batch_size)):
            idx = order[start:start + batch_size]
            result = network.forward(x[idx], mode="train", seed=derive_seed(seed, "dropout", epoch, b))
            probs = result.probabilities if present is None else restrict_to_classes(result.probabilities, present)
            loss, dlogits = cross_entropy(probs, y[idx])
            grads = network.backward(result, dlogits)
            adam_step(params, grads, optimizer, decay)
            total += loss * len(idx)
        curve.append(total / n)
        logger.debug(f"{network.name} epoch {epoch + 1}/{epochs}: loss {curve[-1]:.6f}")
    return curve


def _check_schedule(epochs: int, batch_size: int, learning_rate: float) -> None:
    if epochs < 0:
        raise ConfigError(f"epochs must be >= 0, got {epochs}")
    if batch_size < 1:
        raise ConfigError(f"batch_size must be positive, got {batch_size}")
    if learning_rate <= 0:
        raise ConfigError(f"learning_rate must be positive, got {learning_rate}")


def pretrain(model: HarModel,
             windows: WindowSet,
             epochs: int = DEFAULT_EPOCHS,
             batch_size: int = 64,
             learning_rate: float = 1e-3,
             seed: int = 0) -> TrainingResult:
    """
    Train every layer with Adam and cross-entropy.

    Args:
        model: Built model; trained in place.
        windows: Labeled source windows.
        epochs: Passes over the data (0 leaves the model as built).
        batch_size: Minibatch size.
        learning_rate: Adam step size.
        seed: Drives shuffling and dropout masks.

    Returns:
        TrainingResult with the per-epoch mean loss.
    """
    _check_schedule(epochs, batch_size, learning_rate)
    if len(windows) == 0:
        raise DataError("Cannot pretrain on an empty window set")
    missing = absent_classes(windows.labels, model.n_classes)
    if missing:
        logger.warning(f"Pretraining data has no samples of classes {missing}; the model cannot predict them reliably")

    model.network.freeze(0)
    model.optimizer = AdamState(learning_rate=learning_rate)
    logger.info(f"Pretraining {model.config.name} on {len(windows)} windows for {epochs} epochs")
    curve = _fit(model, windows.values, windows.labels, epochs, batch_size, seed, model.optimizer)
    if curve:
        logger.info(f"Pretraining finished: loss {curve[0]:.4f} -> {curve[-1]:.4f}")
    return TrainingResult(model=model, loss_curve=curve, absent_classes=missing)


def fine_tune(model: HarModel,
              windows: WindowSet,
              pool,
              epochs: int = DEFAULT_EPOCHS,
              learning_rate: float = 1e-3,
              seed: int = 0,
              batch_size: int = 64,
              optimizer: Optional[AdamState] = None) -> TrainingResult:
    """
    Fine-tune a copy of ``model`` on ``pool`` with the feature stack frozen.

    Args:
        model: Teacher; never modified.
        windows: Target training windows the pool indexes into.
        pool: Anything with aligned ``indices`` and ``labels`` arrays (a LabeledPool).
        epochs: Passes over the pool (0 returns an unchanged copy).
        learning_rate: Adam step size for the head.
        seed: Drives shuffling and dropout masks.
        batch_size: Minibatch size.
        optimizer: Adam state to continue from; copied, never modified.
            Defaults to the teacher's state. Frozen parameters' moments are
            never touched.

    Returns:
        TrainingResult whose model is the student. When the pool lacks some
        classes, the loss is taken over the present classes only and the
        absent ones are listed.
    """
    _check_schedule(epochs, batch_size, learning_rate)
    indices = np.asarray(pool.indices, dtype=np.int64)
    labels = np.asarray(pool.labels, dtype=np.int64)
    if len(indices) == 0:
        raise DataError("Cannot fine-tune on an empty pool")

    student = model.clone()
    student.network.freeze(student.head_start)
    state = copy.deepcopy(optimizer) if optimizer is not None else student.optimizer
    if state is None:
        state = AdamState(learning_rate=learning_rate)
    state.learning_rate = learning_rate
    student.optimizer = state

    missing = absent_classes(labels, model.n_classes)
    present = None
    if missing:
        present = np.setdiff1d(np.arange(model.n_classes), missing)
        logger.warning(f"Fine-tuning pool has no samples of classes {missing}; "
                       f"proceeding with the loss over classes {present.tolist()}")

    logger.info(f"Fine-tuning head of {model.config.name} on {len(indices)} pooled windows for {epochs} epochs")
    curve = _fit(student, windows.values[indices], labels, epochs, batch_size, seed, state, present)
    return TrainingResult(model=student, loss_curve=curve, absent_classes=missing)
