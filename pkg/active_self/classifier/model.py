"""Model construction and probabilistic prediction."""

import copy
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config.logging_config import get_netcore_logger
from ..data.windowing import WindowSet
from ..errors import ConfigError, DataError, InvariantViolation
from ..netcore.checkpoint import load_checkpoint, save_checkpoint
from ..netcore.network import Network
from ..netcore.optim import AdamState
from .architectures import ArchitectureConfig, expected_parameter_count, layer_plan

logger = get_netcore_logger()

PREDICT_BATCH = 1024


class HarModel:
    """
    A built network plus the architecture it came from.

    ``head_start`` is the index of the first layer that stays trainable during
    fine-tuning; every layer before it forms the shared feature stack.
    """

    def __init__(self, config: ArchitectureConfig, network: Network, head_start: int, seed: int):
        self.config = config
        self.network = network
        self.head_start = head_start
        self.seed = seed
        self.optimizer: Optional[AdamState] = None

    @property
    def n_classes(self) -> int:
        return self.config.n_classes

    def feature_stack_names(self) -> List[str]:
        return [name for name, _, _, i in self.network.named_parameters() if i < self.head_start]

    def head_names(self) -> List[str]:
        return [name for name, _, _, i in self.network.named_parameters() if i >= self.head_start]

    def digest(self) -> str:
        return self.network.digest()

    def feature_digest(self) -> str:
        return self.network.digest(self.feature_stack_names())

    def clone(self) -> "HarModel":
        return copy.deepcopy(self)


@dataclass
class Prediction:
    """Softmax output, penultimate features, and the derived label/confidence of one window."""
    probabilities: np.ndarray
    features: np.ndarray
    confidence: float
    label: int


@dataclass
class PredictionBatch:
    """Column-stored predictions for a window set; indexable like a list of Prediction."""
    probabilities: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        self.confidence = self.probabilities.max(axis=1)
        self.labels = np.argmax(self.probabilities, axis=1).astype(np.int64)

    def __len__(self) -> int:
        return int(self.probabilities.shape[0])

    def __getitem__(self, index: int) -> Prediction:
        return Prediction(
            probabilities=self.probabilities[index],
            features=self.features[index],
            confidence=float(self.confidence[index]),
            label=int(self.labels[index]),
        )

    def subset(self, indices: Union[Sequence[int], np.ndarray]) -> "PredictionBatch":
        idx = np.asarray(indices, dtype=np.int64)
        return PredictionBatch(self.probabilities[idx], self.features[idx])


def build(config: ArchitectureConfig, seed: int, init: str = "he_uniform") -> HarModel:
    """
    Build the network for ``config`` with weights drawn from ``seed``.

    Raises:
        ConfigError: input shape incompatible with the kernel/stride chain.
    """
    plan = layer_plan(config)
    network = Network(plan.specs, config.input_shape, name=config.name)
    network.build(np.random.default_rng(seed), init=init)
    expected = expected_parameter_count(config)
    if network.parameter_count() != expected:
        raise InvariantViolation(
            f"{config.name}: built {network.parameter_count()} parameters, closed form gives {expected}"
        )
    logger.info(
        f"Built {config.name} for input {config.input_shape}, K={config.n_classes}: "
        f"{expected} parameters, feature stack = layers [0, {plan.head_start})"
    )
    return HarModel(config, network, plan.head_start, seed)


def predict(model: HarModel, windows: Union[WindowSet, np.ndarray], batch_size: int = PREDICT_BATCH) -> PredictionBatch:
    """
    Eval-mode forward over every window.

    Returns:
        PredictionBatch with N×K probabilities and N×D penultimate features.
    """
    values = windows.values if isinstance(windows, WindowSet) else np.asarray(windows, dtype=np.float64)
    if batch_size < 1:
        raise ConfigError("batch_size must be positive")
    network = model.network
    feature_index = network.feature_layer
    probs, feats = [], []
    for start in range(0, len(values), batch_size):
        result = network.forward(values[start:start + batch_size], mode="eval")
        probs.append(result.probabilities)
        feats.append(result.activations[feature_index])
    if not probs:
        k = model.n_classes
        width = network.layers[feature_index].input_shape[0]
        return PredictionBatch(np.zeros((0, k)), np.zeros((0, width)))
    return PredictionBatch(np.concatenate(probs, axis=0), np.concatenate(feats, axis=0))


def save_model(model: HarModel, path: Union[str, Path], metadata: Optional[Dict[str, Any]] = None) -> Path:
    """Checkpoint the network together with its architecture and head boundary."""
    header = {
        "architecture": model.config.to_dict(),
        "head_start": model.head_start,
        **(metadata or {}),
    }
    return save_checkpoint(path, model.network, model.seed, optimizer=model.optimizer, metadata=header)


def load_model(path: Union[str, Path]) -> Tuple[HarModel, Dict[str, Any]]:
    """
    Restore a model written by :func:`save_model`.

    Returns:
        (model, header metadata)
    """
    network, optimizer, header = load_checkpoint(path)
    metadata = header.get("metadata", {})
    if "architecture" not in metadata:
        raise DataError(f"Checkpoint {path} carries no architecture metadata")
    config = ArchitectureConfig.from_dict(metadata["architecture"])
    model = HarModel(config, network, int(metadata["head_start"]), int(header["seed"]))
    model.optimizer = optimizer
    return model, metadata
