"""Lower-limb EMG locomotion profile package."""

from .profile_config import EmgProfile

__all__ = ['EmgProfile']
