"""Configuration and profile utilities for testing.

This module provides utilities for creating test configurations,
setting up test environments, and managing profile-specific test data.
"""

from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

from active_self.data import SynthConfig
from config.profiles.base_profile import DatasetProfile
from config.profiles.profile_factory import ProfileFactory
from config.settings import Config, apply_profile_defaults, load_config

# Small enough for a full pretrain/adapt cycle in a unit test
TINY_SYNTH = SynthConfig(
    n_classes=3,
    n_subjects=3,
    n_channels=4,
    class_duration_s=4.0,
    bouts_per_class=2,
    shift_magnitude=0.4,
    noise_std=0.3,
)

TINY_HIDDEN = (16, 8)


def tiny_synth(**changes: Any) -> SynthConfig:
    """Copy of the tiny synthetic config with ``changes`` applied."""
    data = asdict(TINY_SYNTH)
    data.update(changes)
    return SynthConfig(**data)


def fast_overrides(csv_file: Optional[str] = None, **extra: Any) -> Dict[str, str]:
    """Config keys for a quick run: tiny data, two epochs, one iteration.

    Args:
        csv_file: Ingestion CSV the run should read
        **extra: Further dotted keys (use ``__`` for the dot, e.g. ``run__variant``)

    Returns:
        Dict[str, str]: Flat key=value settings as a config file would hold them
    """
    values = {f"synth.{k}": str(v) for k, v in asdict(TINY_SYNTH).items() if k != "seed"}
    values.update({
        "hidden": ",".join(str(h) for h in TINY_HIDDEN),
        "train.epochs": "2",
        "run.epochs": "2",
        "run.max_iterations": "1",
        "run.n_per_boundary": "5",
    })
    if csv_file is not None:
        values["csv_file"] = str(csv_file)
    for key, value in extra.items():
        values[key.replace("__", ".")] = str(value)
    return values


def write_config_file(tmp_path: Path, values: Mapping[str, Any], name: str = "run.env") -> str:
    """Write a flat key=value config file and return its path."""
    path = Path(tmp_path) / name
    lines = [f"{key}={value}" for key, value in values.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


def create_test_profile(profile_name: str, csv_path: Optional[str] = None, **kwargs: Any) -> DatasetProfile:
    """Create a profile through the factory, pointed at a custom CSV.

    Args:
        profile_name: Name of the profile to create
        csv_path: Path to CSV file for testing
        **kwargs: Extra constructor arguments (e.g. ``synth`` for the synthetic profile)

    Returns:
        DatasetProfile: Profile instance configured for testing

    Raises:
        ConfigError: If profile_name is not a discovered profile
    """
    return ProfileFactory.create_profile(profile_name, csv_file=csv_path, **kwargs)


def setup_test_environment(tmp_path: Path, csv_path: str, **extra: Any) -> Tuple[Config, DatasetProfile]:
    """Load a fast config for ``csv_path`` and the synthetic profile it implies.

    Returns:
        Tuple of (Config with profile defaults applied, profile)
    """
    config = load_config(overrides=fast_overrides(csv_path, output_dir=str(tmp_path / "out"), **extra))
    profile = create_test_profile("synthetic_profile", csv_path, synth=config.synth)
    return apply_profile_defaults(config, profile), profile
