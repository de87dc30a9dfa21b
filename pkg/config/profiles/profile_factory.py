#!/usr/bin/env python3
"""
Factory that discovers dataset profiles under config/profiles/ and builds them by name.

A profile package qualifies when it holds a profile_config.py defining a
DatasetProfile subclass whose name ends in "Profile".
"""

from typing import Any, Dict, List, Optional, Tuple, Type
import importlib
from pathlib import Path

from active_self.errors import ConfigError
from config.logging_config import get_logger
from .base_profile import DatasetProfile

logger = get_logger(__name__)

SKIPPED_DIRS = ("common_test_utils",)


class ProfileFactory:
    """Discovers dataset profiles once and instantiates them on demand."""

    # profile name -> (module path, class name)
    _discovered_profiles: Optional[Dict[str, Tuple[str, str]]] = None

    @staticmethod
    def _profile_class_name(module) -> Optional[str]:
        for attr_name in sorted(vars(module)):
            attr = getattr(module, attr_name)
            if (isinstance(attr, type) and attr_name.endswith("Profile")
                    and issubclass(attr, DatasetProfile) and attr is not DatasetProfile):
                return attr_name
        return None

    @classmethod
    def _discover_profiles(cls) -> Dict[str, Tuple[str, str]]:
        if cls._discovered_profiles is not None:
            return cls._discovered_profiles

        found: Dict[str, Tuple[str, str]] = {}
        for item in sorted(Path(__file__).parent.iterdir()):
            if not item.is_dir() or item.name.startswith((".", "__")) or item.name in SKIPPED_DIRS:
                continue
            if not (item / "profile_config.py").exists():
                continue
            module_path = f"config.profiles.{item.name}.profile_config"
            try:
                module = importlib.import_module(module_path)
            except Exception as e:
                logger.warning(f"Skipping profile '{item.name}': {e}")
                continue
            class_name = cls._profile_class_name(module)
            if class_name is not None:
                found[item.name] = (module_path, class_name)

        cls._discovered_profiles = found
        logger.debug(f"Discovered dataset profiles: {sorted(found)}")
        return found

    @classmethod
    def get_available_profiles(cls) -> List[str]:
        """Names of all discovered dataset profiles, sorted."""
        return sorted(cls._discover_profiles())

    @classmethod
    def create_profile(cls, profile_name: str, **kwargs: Any) -> DatasetProfile:
        """Instantiate a profile by name; kwargs (csv_file, synth) go to its constructor."""
        profiles = cls._discover_profiles()
        if profile_name not in profiles:
            raise ConfigError(
                f"Unknown profile: {profile_name}. Available profiles: {cls.get_available_profiles()}"
            )

        module_path, class_name = profiles[profile_name]
        try:
            profile_class: Type[DatasetProfile] = getattr(importlib.import_module(module_path), class_name)
        except Exception as e:
            raise ImportError(f"Failed to import profile '{profile_name}' from {module_path}.{class_name}: {e}")
        return profile_class(**kwargs)

    @classmethod
    def refresh(cls) -> None:
        """Forget discovered profiles so the next access rescans the directory."""
        cls._discovered_profiles = None

    @classmethod
    def get_default_profile(cls, **kwargs: Any) -> DatasetProfile:
        """Build the profile named by settings.PROFILE_NAME, else the first one found."""
        available = cls.get_available_profiles()
        if not available:
            raise ConfigError("No dataset profiles found under config/profiles/")

        from config.settings import PROFILE_NAME

        name = PROFILE_NAME if PROFILE_NAME in available else available[0]
        return cls.create_profile(name, **kwargs)
