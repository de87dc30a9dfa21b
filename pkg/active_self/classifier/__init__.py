from .architectures import ARCHITECTURES, ArchitectureConfig, expected_parameter_count, layer_plan
from .model import HarModel, Prediction, PredictionBatch, build, load_model, predict, save_model
from .training import TrainConfig, TrainingResult, fine_tune, pretrain

__all__ = [
    "ARCHITECTURES",
    "ArchitectureConfig",
    "expected_parameter_count",
    "layer_plan",
    "HarModel",
    "Prediction",
    "PredictionBatch",
    "build",
    "predict",
    "save_model",
    "load_model",
    "TrainConfig",
    "TrainingResult",
    "fine_tune",
    "pretrain",
]
