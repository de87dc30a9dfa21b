"""Per-run adaptation settings and variant step gating."""

from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Tuple

from ..errors import ConfigError
from ..selection.active import SELECTION_ORDERS

# Steps: 1 self-training, 2 active querying, 3 propagation, 4 fine-tuning.
VARIANT_STEPS: Dict[str, Tuple[int, ...]] = {
    "activeself": (1, 2, 3, 4),
    "sub_ust": (1, 4),
    "sub_slss": (1, 2, 4),
    "fullft": (4,),
}
VARIANTS = tuple(VARIANT_STEPS)
ABLATION_VARIANTS = ("activeself", "sub_slss", "sub_ust")


@dataclass
class RunConfig:
    variant: str = "activeself"
    max_iterations: int = 3
    epochs: int = 30
    base_threshold: float = 0.3
    n_per_boundary: int = 10
    thres_t_s: float = 5.0
    fs_cutoff: float = 1.0
    learning_rate: float = 1e-3
    batch_size: int = 64
    seed: int = 0
    selection: str = "lowest"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.variant not in VARIANT_STEPS:
            raise ConfigError(f"Unknown variant '{self.variant}'. Available: {list(VARIANTS)}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if not 0.0 <= self.base_threshold < 1.0:
            raise ConfigError(f"base_threshold must be in [0, 1), got {self.base_threshold}")
        if self.n_per_boundary < 1:
            raise ConfigError(f"n_per_boundary must be >= 1, got {self.n_per_boundary}")
        if self.thres_t_s <= 0 or self.fs_cutoff <= 0:
            raise ConfigError("thres_t_s and fs_cutoff must be positive")
        if self.learning_rate <= 0 or self.batch_size < 1:
            raise ConfigError("learning_rate must be positive and batch_size >= 1")
        if self.selection not in SELECTION_ORDERS:
            raise ConfigError(f"selection must be one of {SELECTION_ORDERS}, got '{self.selection}'")

    @property
    def steps(self) -> Tuple[int, ...]:
        return VARIANT_STEPS[self.variant]

    def runs(self, step: int) -> bool:
        return step in self.steps

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})

    def with_overrides(self, **changes: Any) -> "RunConfig":
        data = self.to_dict()
        data.update({k: v for k, v in changes.items() if v is not None})
        return RunConfig.from_dict(data)
