from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from active_self.classifier import ArchitectureConfig
from active_self.data.manager import BASE_COLUMNS


# =============================================================================
# SHARED CONFIGURATION CONSTANTS
# =============================================================================

class ProfileConfig:
    """Shared configuration constants for all dataset profiles."""

    # Segmentation
    DEFAULT_WINDOW_MS = 300.0
    DEFAULT_STRIDE_MS = 30.0

    # Adaptation loop
    DEFAULT_BASE_THRESHOLD = 0.3
    DEFAULT_MAX_ITERATIONS = 3
    DEFAULT_EPOCHS = 30
    DEFAULT_N_PER_BOUNDARY = 10
    DEFAULT_THRES_T_S = 5.0

    # Training regime
    DEFAULT_LEARNING_RATE = 1e-3
    DEFAULT_BATCH_SIZE = 64
    DEFAULT_ARCHITECTURE = "mlp"
    DEFAULT_HIDDEN = (64, 32)


class DatasetProfile(ABC):
    """Abstract base class for dataset profiles: schema, sampling, and training regime."""

    # Schema Definition
    @property
    @abstractmethod
    def channel_names(self) -> List[str]:
        """Sensor channel columns, in network input order."""
        pass

    @property
    @abstractmethod
    def class_names(self) -> List[str]:
        """Activity names; the label column holds their indices."""
        pass

    @property
    @abstractmethod
    def sample_rate_hz(self) -> float:
        """Rate every recording is brought to before segmentation."""
        pass

    @abstractmethod
    def get_csv_file_path(self) -> str:
        """Return the ingestion CSV for this profile."""
        pass

    # Training regime
    @property
    @abstractmethod
    def architecture(self) -> str:
        """Network stack: 'mlp', 'tpn' or 'double_stream'."""
        pass

    @property
    @abstractmethod
    def base_threshold(self) -> float:
        """Iteration-1 pseudo-label confidence threshold."""
        pass

    @property
    def n_per_boundary(self) -> int:
        """Core-set queries per boundary category and iteration."""
        return ProfileConfig.DEFAULT_N_PER_BOUNDARY

    @property
    def learning_rate(self) -> float:
        return ProfileConfig.DEFAULT_LEARNING_RATE

    @property
    def batch_size(self) -> int:
        return ProfileConfig.DEFAULT_BATCH_SIZE

    @property
    def window_ms(self) -> float:
        return ProfileConfig.DEFAULT_WINDOW_MS

    @property
    def stride_ms(self) -> float:
        return ProfileConfig.DEFAULT_STRIDE_MS

    @property
    def hidden(self) -> Tuple[int, ...]:
        """Hidden widths, used only by the mlp."""
        return ProfileConfig.DEFAULT_HIDDEN

    # Derived
    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def n_channels(self) -> int:
        return len(self.channel_names)

    @property
    def required_columns(self) -> List[str]:
        return list(BASE_COLUMNS) + list(self.channel_names)

    @property
    def window_steps(self) -> int:
        return int(round(self.window_ms * self.sample_rate_hz / 1000.0))

    # Utility Methods
    def validate_columns(self, df: pd.DataFrame) -> List[str]:
        """Validate that DataFrame has all required columns. Returns list of missing columns."""
        return [col for col in self.required_columns if col not in df.columns]

    def clean_data(self, df: pd.DataFrame) -> pd.DataFrame:
        """
        Drop rows with missing sensor values or labels.

        Row order is preserved; timestamps must already be monotone per subject.
        """
        cleaned = df.dropna(subset=self.required_columns)
        return cleaned.reset_index(drop=True)

    def architecture_config(self, hidden: Optional[Sequence[int]] = None) -> ArchitectureConfig:
        """Network configuration for windows of this profile."""
        return ArchitectureConfig(
            name=self.architecture,
            input_shape=(self.n_channels, self.window_steps),
            n_classes=self.n_classes,
            hidden=tuple(hidden) if hidden else self.hidden,
        )

    def reference_results(self) -> Dict[str, Dict[str, float]]:
        """
        Externally reported results per method, shown beside ours in the table.

        Keys are method names (``source_only``, ``sub_ust``, ``sub_slss``,
        ``activeself``, ``fullft``); values hold ``accuracy`` and optionally
        ``labeled_percentage``.
        """
        return {}

    def describe(self) -> Dict[str, Any]:
        return {
            "channels": self.n_channels,
            "classes": self.n_classes,
            "sample_rate_hz": self.sample_rate_hz,
            "window_ms": self.window_ms,
            "stride_ms": self.stride_ms,
            "architecture": self.architecture,
            "base_threshold": self.base_threshold,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
        }
