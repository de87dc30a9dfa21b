"""Pytest fixtures for common test setup.

This module provides reusable pytest fixtures that eliminate code duplication
across different profile tests.
"""

import pytest
from pathlib import Path
from typing import Tuple

from active_self.classifier import ArchitectureConfig, HarModel, build, pretrain
from active_self.data import LosoSplit, SplitSpec, SynthConfig, WindowSet, loso_split
from config.profiles.base_profile import DatasetProfile
from config.settings import Config
from .config_helpers import TINY_HIDDEN, setup_test_environment, tiny_synth
from .data_generators import make_synthetic_windows, write_synthetic_csv


@pytest.fixture
def temp_csv_path(tmp_path) -> str:
    """Create a temporary CSV file path for testing.

    Args:
        tmp_path: pytest temporary directory fixture

    Returns:
        str: Path to temporary CSV file
    """
    csv_file = tmp_path / "test_data.csv"
    return str(csv_file)


@pytest.fixture
def tiny_synth_config() -> SynthConfig:
    """Three subjects, three classes, four channels, a few seconds each."""
    return tiny_synth()


@pytest.fixture
def tiny_windows(tiny_synth_config) -> WindowSet:
    """Segmented windows of the tiny synthetic benchmark (300 ms / 30 ms)."""
    return make_synthetic_windows(tiny_synth_config)


@pytest.fixture
def tiny_split(tiny_windows) -> LosoSplit:
    """LOSO split of the tiny benchmark with S01 as target."""
    return loso_split(tiny_windows, SplitSpec(target_subject="S01", seed=7))


@pytest.fixture
def tiny_architecture(tiny_windows) -> ArchitectureConfig:
    """Small mlp sized for the tiny benchmark windows."""
    return ArchitectureConfig(
        name="mlp",
        input_shape=tiny_windows.input_shape,
        n_classes=tiny_windows.n_classes,
        hidden=TINY_HIDDEN,
    )


@pytest.fixture
def source_model(tiny_architecture, tiny_split) -> HarModel:
    """Source model pretrained for a few epochs on the non-target subjects."""
    model = build(tiny_architecture, seed=11)
    pretrain(model, tiny_split.pretrain, epochs=5, batch_size=32, learning_rate=5e-3, seed=12)
    return model


@pytest.fixture
def synthetic_csv(tmp_path, tiny_synth_config) -> str:
    """Tiny synthetic benchmark written in the ingestion CSV layout."""
    return write_synthetic_csv(tiny_synth_config, tmp_path)


@pytest.fixture
def synthetic_environment(tmp_path, synthetic_csv) -> Tuple[Config, DatasetProfile]:
    """Fast config plus synthetic profile, both pointed at ``synthetic_csv``."""
    return setup_test_environment(tmp_path, synthetic_csv)


@pytest.fixture
def output_dir(tmp_path) -> Path:
    """Empty output directory for CLI runs."""
    out = tmp_path / "out"
    out.mkdir()
    return out
