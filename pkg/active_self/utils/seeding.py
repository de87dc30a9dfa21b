"""Deterministic seed fan-out.

All randomness in a run flows from one root seed. Each phase asks for a child
seed by naming itself; the same (root, tags) pair always yields the same seed.
"""

import hashlib
from typing import Union

import numpy as np

Tag = Union[str, int]


def _tag_entropy(tag: Tag) -> int:
    if isinstance(tag, (int, np.integer)):
        return int(tag) & 0xFFFFFFFF
    digest = hashlib.sha256(str(tag).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")


def derive_seed(root: int, *tags: Tag) -> int:
    """Return a 32-bit child seed for ``root`` scoped by ``tags``."""
    sequence = np.random.SeedSequence([int(root) & 0xFFFFFFFF] + [_tag_entropy(t) for t in tags])
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def make_rng(root: int, *tags: Tag) -> np.random.Generator:
    """A numpy Generator seeded with ``derive_seed(root, *tags)``."""
    return np.random.default_rng(derive_seed(root, *tags))
