"""PAMAP physical-activity profile package."""

from .profile_config import PamapProfile

__all__ = ['PamapProfile']
