"""Synthetic shifted-subject benchmark profile package."""

from .profile_config import SyntheticProfile

__all__ = ['SyntheticProfile']
