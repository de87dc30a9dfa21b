"""Dataset profiles: sensor schema, sampling, and training regime per dataset."""

from .base_profile import DatasetProfile, ProfileConfig
from .profile_factory import ProfileFactory

# Individual profiles are loaded dynamically via ProfileFactory

__all__ = ['DatasetProfile', 'ProfileConfig', 'ProfileFactory']
