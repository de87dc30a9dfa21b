"""Utility helpers shared across the adaptation library."""

from .seeding import derive_seed, make_rng
from .timing import PhaseTimer, PHASES

__all__ = [
    'derive_seed',
    'make_rng',
    'PhaseTimer',
    'PHASES',
]
