from pathlib import Path
from typing import Dict, List, Optional

from active_self.data.dsads import DSADS_ACTIVITIES, dsads_channel_names
from config.profiles.base_profile import DatasetProfile


class DsadsProfile(DatasetProfile):
    """
    Profile for DSADS: five 9-axis IMU units (45 channels), twelve daily
    activities, converted from 25 Hz to 100 Hz by ``convert_dsads``.
    """

    def __init__(self, csv_file: Optional[str] = None):
        self.profile_name = "dsads_profile"
        self.csv_file = csv_file or self.get_default_csv_file_path()

    def get_csv_file_path(self) -> str:
        return self.csv_file

    def get_default_csv_file_path(self) -> str:
        return str(Path(__file__).parent / "test_data/dsads.csv")

    @property
    def channel_names(self) -> List[str]:
        return dsads_channel_names()

    @property
    def class_names(self) -> List[str]:
        return list(DSADS_ACTIVITIES.values())

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
        return 1e-5

    @property
    def batch_size(self) -> int:
        return 512

    def reference_results(self) -> Dict[str, Dict[str, float]]:
        return {
            "source_only": {"accuracy": 86.96},
            "sub_ust": {"accuracy": 89.12},
            "sub_slss": {"accuracy": 89.71},
            "activeself": {"accuracy": 95.20, "labeled_percentage": 0.17},
            "fullft": {"accuracy": 97.13, "labeled_percentage": 43.0},
        }
