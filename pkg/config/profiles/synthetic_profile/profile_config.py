from pathlib import Path
from typing import List, Optional

from active_self.data import SynthConfig, channel_columns
from config.profiles.base_profile import DatasetProfile


class SyntheticProfile(DatasetProfile):
    """Profile for generated multichannel recordings with a per-subject affine shift."""

    def __init__(self, csv_file: Optional[str] = None, synth: Optional[SynthConfig] = None):
        self.profile_name = "synthetic_profile"
        self.synth = synth or SynthConfig()
        self.synth.validate()
        self.csv_file = csv_file or self.get_default_csv_file_path()

    def get_csv_file_path(self) -> str:
        """Get the path to the CSV file for this profile."""
        return self.csv_file

    def get_default_csv_file_path(self) -> str:
        """Where ``synth-gen`` writes by default."""
        return str(Path(__file__).parent / "test_data/synthetic.csv")

    @property
    def channel_names(self) -> List[str]:
        return channel_columns(self.synth.n_channels)

    @property
    def class_names(self) -> List[str]:
        return [f"activity_{k}" for k in range(self.synth.n_classes)]

    @property
    def sample_rate_hz(self) -> float:
        return self.synth.sample_rate_hz

    @property
    def architecture(self) -> str:
        return "mlp"

    @property
    def base_threshold(self) -> float:
        # six or fewer sharply separated classes: confidences run high
        return 0.8

    @property
    def n_per_boundary(self) -> int:
        return 5
