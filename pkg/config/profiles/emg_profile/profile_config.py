from pathlib import Path
from typing import List, Optional

from active_self.data import channel_columns
from config.profiles.base_profile import DatasetProfile

EMG_CHANNELS = 9
EMG_RATE_HZ = 1111.11
LOCOMOTION_MODES = [
    "level_walking", "stair_ascent", "stair_descent", "ramp_ascent", "ramp_descent",
]


class EmgProfile(DatasetProfile):
    """
    Profile for surface-EMG locomotion recordings: nine muscles sampled at
    1111.11 Hz, so a 300 ms window holds 333 samples and fits the TPN stack.
    """

    def __init__(self, csv_file: Optional[str] = None, class_names: Optional[List[str]] = None):
        self.profile_name = "emg_profile"
        self.csv_file = csv_file or self.get_default_csv_file_path()
        self._class_names = list(class_names or LOCOMOTION_MODES)

    def get_csv_file_path(self) -> str:
        return self.csv_file

    def get_default_csv_file_path(self) -> str:
        return str(Path(__file__).parent / "test_data/emg.csv")

    @property
    def channel_names(self) -> List[str]:
        return channel_columns(EMG_CHANNELS)

    @property
    def class_names(self) -> List[str]:
        return self._class_names

    @property
    def sample_rate_hz(self) -> float:
        return EMG_RATE_HZ

    @property
    def architecture(self) -> str:
        return "tpn"

    @property
    def base_threshold(self) -> float:
        return 0.5

    @property
    def learning_rate(self) -> float:
        return 1e-6
