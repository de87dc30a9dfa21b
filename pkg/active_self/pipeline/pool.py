"""The per-iteration training set T′ = S ∪ A."""

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from ..errors import InvariantViolation
from ..selection.augment import AugmentedSet
from ..selection.selftrain import SelfTrainingSet

PSEUDO = "pseudo"


@dataclass
class LabeledPool:
    """One entry per window index: label and provenance (pseudo, queried or propagated)."""
    indices: np.ndarray
    labels: np.ndarray
    provenance: List[str]
    iteration: int

    def __len__(self) -> int:
        return int(len(self.indices))

    def composition(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for p in self.provenance:
            counts[p] = counts.get(p, 0) + 1
        return dict(sorted(counts.items()))

    def as_dict(self) -> Dict[int, int]:
        return {int(i): int(l) for i, l in zip(self.indices, self.labels)}


def assemble_pool(selected: SelfTrainingSet,
                  augmented: Optional[AugmentedSet] = None,
                  iteration: Optional[int] = None) -> LabeledPool:
    """
    Union of self-labelled and oracle-derived windows, ordered by index.

    Raises:
        InvariantViolation: S and A share a window.
    """
    s_idx = np.asarray(selected.indices, dtype=np.int64)
    parts_idx = [s_idx]
    parts_lab = [np.asarray(selected.pseudo_labels, dtype=np.int64)]
    provenance = [PSEUDO] * len(s_idx)
    if augmented is not None and len(augmented):
        overlap = np.intersect1d(s_idx, augmented.indices)
        if len(overlap):
            raise InvariantViolation(
                f"self-training set and augmented set overlap on {len(overlap)} windows",
                {"overlap": overlap[:20].tolist()},
            )
        parts_idx.append(np.asarray(augmented.indices, dtype=np.int64))
        parts_lab.append(np.asarray(augmented.labels, dtype=np.int64))
        provenance += list(augmented.provenance)

    indices = np.concatenate(parts_idx)
    labels = np.concatenate(parts_lab)
    order = np.argsort(indices, kind="stable")
    if len(np.unique(indices)) != len(indices):
        raise InvariantViolation("pool holds more than one entry for a window")
    return LabeledPool(
        indices=indices[order],
        labels=labels[order],
        provenance=[provenance[i] for i in order],
        iteration=selected.iteration if iteration is None else iteration,
    )
