import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Set, Tuple, TYPE_CHECKING, Union

from dotenv import dotenv_values

from active_self.classifier import ArchitectureConfig, TrainConfig
from active_self.data import SplitSpec, SynthConfig
from active_self.errors import ConfigError
from active_self.pipeline import RunConfig
from config.logging_config import get_logger

if TYPE_CHECKING:
    from active_self.evaluation import BenchmarkSpec
    from config.profiles.base_profile import DatasetProfile

logger = get_logger(__name__)

# =============================================================================
# CONFIGURATION - Change this to switch profiles
# =============================================================================
PROFILE_NAME = "synthetic_profile"  # Options: "synthetic_profile", "dsads_profile", "pamap_profile", "emg_profile"

# =============================================================================
# APPLICATION SETTINGS
# =============================================================================
BASE_DIR = Path(__file__).parent.parent.resolve()

OUTPUT_DIR = BASE_DIR / "runs"
ROOT_SEED = 0
JOBS = 1

# Section name -> dataclass holding that section's keys
SECTIONS = {
    "synth": SynthConfig,
    "split": SplitSpec,
    "train": TrainConfig,
    "run": RunConfig,
}

# Keys whose default comes from the dataset profile unless set explicitly
PROFILE_KEYS = {
    "architecture": "architecture",
    "hidden": "hidden",
    "train.learning_rate": "learning_rate",
    "train.batch_size": "batch_size",
    "run.learning_rate": "learning_rate",
    "run.batch_size": "batch_size",
    "run.base_threshold": "base_threshold",
    "run.n_per_boundary": "n_per_boundary",
}

TRUE_VALUES = {"1", "true", "yes", "on"}
FALSE_VALUES = {"0", "false", "no", "off"}


@dataclass
class Config:
    profile_name: str = PROFILE_NAME
    csv_file: Optional[str] = None
    architecture: Optional[str] = None
    hidden: Tuple[int, ...] = (64, 32)
    seed: int = ROOT_SEED
    log_level: Optional[str] = None
    output_dir: str = str(OUTPUT_DIR)
    jobs: int = JOBS
    synth: SynthConfig = field(default_factory=SynthConfig)
    split: SplitSpec = field(default_factory=SplitSpec)
    train: TrainConfig = field(default_factory=TrainConfig)
    run: RunConfig = field(default_factory=RunConfig)
    explicit_keys: Set[str] = field(default_factory=set, compare=False, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        data = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "explicit_keys"}
        for name in SECTIONS:
            data[name] = asdict(data[name])
        data["hidden"] = list(self.hidden)
        return data

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form; identical configs hash identically."""
        blob = json.dumps(self.to_dict(), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def architecture_config(self, profile: 'DatasetProfile') -> ArchitectureConfig:
        base = profile.architecture_config(self.hidden)
        return replace(base, name=self.architecture or base.name)

    def benchmark_spec(self, profile: 'DatasetProfile', include_fullft: bool = True) -> 'BenchmarkSpec':
        from active_self.evaluation import BenchmarkSpec

        return BenchmarkSpec(
            architecture=self.architecture_config(profile),
            train=self.train,
            run=self.run,
            split=self.split,
            include_fullft=include_fullft,
            subjects=[self.split.target_subject] if self.split.target_subject else None,
            seed=self.seed,
        )


def _coerce(key: str, raw: Any, default: Any) -> Any:
    """Convert a raw config value to the type of the field default."""
    if not isinstance(raw, str):
        return tuple(raw) if isinstance(default, tuple) else raw
    text = raw.strip()
    try:
        if isinstance(default, bool):
            lowered = text.lower()
            if lowered in TRUE_VALUES:
                return True
            if lowered in FALSE_VALUES:
                return False
            raise ValueError(f"not a boolean: '{text}'")
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise ConfigError(f"Invalid value for '{key}': {e}") from e
    if default is None:
        return text or None
    return text


def _section_defaults(section: str) -> Dict[str, Any]:
    cls = SECTIONS[section]
    return {f.name: getattr(cls(), f.name) for f in fields(cls)}


def _split_values(values: Mapping[str, Any]) -> Tuple[Dict[str, Any], Dict[str, Dict[str, Any]]]:
    top_defaults = {f.name: f.default for f in fields(Config)
                    if f.name not in SECTIONS and f.name != "explicit_keys"}
    top: Dict[str, Any] = {}
    sections: Dict[str, Dict[str, Any]] = {name: {} for name in SECTIONS}
    for key, raw in values.items():
        if "." in key:
            section, name = key.split(".", 1)
            if section not in SECTIONS:
                raise ConfigError(f"Unknown config section '{section}' in key '{key}'")
            defaults = _section_defaults(section)
            if name not in defaults:
                raise ConfigError(f"Unknown config key '{key}'. Known: {sorted(defaults)}")
            sections[section][name] = _coerce(key, raw, defaults[name])
        else:
            if key not in top_defaults:
                raise ConfigError(f"Unknown config key '{key}'. Known: {sorted(top_defaults)}")
            top[key] = _coerce(key, raw, top_defaults[key])
    return top, sections


def load_config(path: Optional[Union[str, Path]] = None,
                overrides: Optional[Mapping[str, Any]] = None) -> Config:
    """
    Load configuration from a flat ``key=value`` file plus overrides.

    Keys are dotted by section (``synth.n_classes``, ``run.variant``,
    ``split.target_subject``); top-level keys are the ``Config`` fields.
    Overrides win over the file. Unless set explicitly, ``synth.seed``
    follows the root ``seed``.

    Args:
        path: Config file; None means defaults only.
        overrides: Extra dotted keys, e.g. from command-line flags.

    Returns:
        Config with every section validated.
    """
    values: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}")
        values.update({k: v for k, v in dotenv_values(path).items() if v is not None})
        logger.info(f"Loaded {len(values)} config keys from {path}")
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    top, sections = _split_values(values)
    if "synth.seed" not in values and "seed" in top:
        sections["synth"]["seed"] = top["seed"]

    built = {}
    for name, cls in SECTIONS.items():
        try:
            built[name] = cls(**sections[name])
        except TypeError as e:
            raise ConfigError(f"Invalid [{name}] settings: {e}") from e
    built["synth"].validate()

    config = Config(**top, **built, explicit_keys=set(values))
    logger.debug(f"Config hash {config.config_hash()[:12]} (profile {config.profile_name})")
    return config


def apply_profile_defaults(config: Config, profile: 'DatasetProfile') -> Config:
    """Fill the profile-owned keys (architecture, regime, threshold) the user did not set."""
    updates: Dict[str, Dict[str, Any]] = {"top": {}, "train": {}, "run": {}}
    for key, attr in PROFILE_KEYS.items():
        if key in config.explicit_keys:
            continue
        section, _, name = key.rpartition(".")
        updates[section or "top"][name] = getattr(profile, attr)
    return replace(
        config,
        train=replace(config.train, **updates["train"]),
        run=config.run.with_overrides(**updates["run"]),
        **updates["top"],
    )


def load_profile(config: Config) -> 'DatasetProfile':
    """Load the data profile named by the configuration."""
    from .profiles.profile_factory import ProfileFactory

    kwargs: Dict[str, Any] = {"csv_file": config.csv_file}
    if config.profile_name == "synthetic_profile":
        kwargs["synth"] = config.synth
    try:
        return ProfileFactory.create_profile(config.profile_name, **kwargs)
    except ImportError as e:
        logger.warning(f"Failed to load profile '{config.profile_name}': {e}")
        logger.info("Falling back to default profile")
        return ProfileFactory.get_default_profile(csv_file=config.csv_file)
