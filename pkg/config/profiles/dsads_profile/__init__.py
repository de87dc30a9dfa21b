"""DSADS daily-and-sports-activities profile package."""

from .profile_config import DsadsProfile

__all__ = ['DsadsProfile']
