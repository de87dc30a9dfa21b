from pathlib import Path
from typing import Dict, List, Optional

from active_self.data import channel_columns
from config.profiles.base_profile import DatasetProfile

# Three IMUs (hand, chest, ankle): 3D acceleration, gyroscope, magnetometer
PAMAP_CHANNELS = 27
PAMAP_ACTIVITIES = [
    "lying", "sitting", "standing", "walking", "running", "cycling",
    "nordic_walking", "ascending_stairs", "descending_stairs",
    "vacuum_cleaning", "ironing", "rope_jumping",
]


class PamapProfile(DatasetProfile):
    """Profile for PAMAP recordings already exported to the ingestion CSV."""

    def __init__(self, csv_file: Optional[str] = None):
        self.profile_name = "pamap_profile"
        self.csv_file = csv_file or self.get_default_csv_file_path()

    def get_csv_file_path(self) -> str:
        return self.csv_file

    def get_default_csv_file_path(self) -> str:
        return str(Path(__file__).parent / "test_data/pamap.csv")

    @property
    def channel_names(self) -> List[str]:
        return channel_columns(PAMAP_CHANNELS)

    @property
    def class_names(self) -> List[str]:
        return list(PAMAP_ACTIVITIES)

    @property
    def sample_rate_hz(self) -> float:
        return 100.0

    @property
    def architecture(self) -> str:
        return "double_stream"

    @property
    def base_threshold(self) -> float:
        return 0.3

    @property
    def learning_rate(self) -> float:
        return 1e-7

    @property
    def batch_size(self) -> int:
        return 256

    def reference_results(self) -> Dict[str, Dict[str, float]]:
        return {
            "source_only": {"accuracy": 49.58},
            "sub_ust": {"accuracy": 80.84},
            "sub_slss": {"accuracy": 81.18},
            "activeself": {"accuracy": 82.05, "labeled_percentage": 0.06},
            "fullft": {"accuracy": 81.92, "labeled_percentage": 43.0},
        }
