"""Label propagation from queried windows to spatio-temporal neighbours."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from config.logging_config import get_pipeline_logger
from ..errors import ConfigError, InvariantViolation
from .selftrain import CenterSet

logger = get_pipeline_logger()

DEFAULT_THRES_T_S = 5.0
DEFAULT_CUTOFF = 1.0
QUERIED = "queried"
PROPAGATED = "propagated"
CHUNK = 4096
HISTOGRAM_EDGES = (0.0, 0.25, 0.5, 0.75, 1.0)


def similarity(coord_q: np.ndarray, coord_j: np.ndarray, center: np.ndarray,
               ts_q_ms: float, ts_j_ms: float, thres_t_s: float = DEFAULT_THRES_T_S) -> float:
    """
    f_S = d(x_j, c) / d(x_q, c) + |ts_q − ts_j| / thres_t.

    Distances are in the 3-D embedding, timestamps in milliseconds, thres_t in
    seconds. Returns inf when x_q sits exactly on the center.
    """
    if thres_t_s <= 0:
        raise ConfigError(f"thres_t must be positive, got {thres_t_s}")
    d_q = float(np.linalg.norm(np.asarray(coord_q, dtype=np.float64) - center))
    if d_q == 0.0:
        return float("inf")
    d_j = float(np.linalg.norm(np.asarray(coord_j, dtype=np.float64) - center))
    return d_j / d_q + abs(float(ts_q_ms) - float(ts_j_ms)) / 1000.0 / thres_t_s


@dataclass
class AugmentedSet:
    """
    Anchors (oracle-labelled windows) plus the neighbours they propagated to.

    ``sources`` holds the anchor index for propagated members and -1 for
    anchors; ``f_s`` is NaN for anchors.
    """
    indices: np.ndarray
    labels: np.ndarray
    provenance: List[str]
    sources: np.ndarray
    f_s: np.ndarray
    flags: List[str] = field(default_factory=list)

    def __len__(self) -> int:
        return int(len(self.indices))

    @property
    def n_propagated(self) -> int:
        return int(sum(p == PROPAGATED for p in self.provenance))

    def propagation_counts(self) -> Dict[str, int]:
        srcs = self.sources[self.sources >= 0]
        values, counts = np.unique(srcs, return_counts=True)
        return {str(int(v)): int(c) for v, c in zip(values, counts)}

    def f_s_histogram(self) -> Dict[str, int]:
        vals = self.f_s[~np.isnan(self.f_s)]
        counts, _ = np.histogram(vals, bins=np.asarray(HISTOGRAM_EDGES))
        return {f"{lo:.2f}-{hi:.2f}": int(c) for lo, hi, c in zip(HISTOGRAM_EDGES[:-1], HISTOGRAM_EDGES[1:], counts)}

    def summary(self) -> Dict[str, Any]:
        return {
            "size": len(self),
            "propagated": self.n_propagated,
            "propagation_counts": self.propagation_counts(),
            "f_s_histogram": self.f_s_histogram(),
            "flags": list(self.flags),
        }


def _anchor_centers(anchor_idx: np.ndarray, anchor_labels: np.ndarray, coords: np.ndarray,
                    centers: CenterSet, flags: List[str]) -> np.ndarray:
    """Center per anchor: its oracle class's center, else the anchor's nearest center."""
    out = np.zeros((len(anchor_idx), 3))
    for i, (index, label) in enumerate(zip(anchor_idx, anchor_labels)):
        if centers.has(int(label)):
            out[i] = centers.coord_of(int(label))
        else:
            dist = np.linalg.norm(centers.coords - coords[index], axis=1)
            out[i] = centers.coords[int(np.argmin(dist))]
            flags.append(f"anchor {int(index)}: class {int(label)} has no center, used nearest center")
    return out


def augment_core_set(anchor_indices: Sequence[int],
                     anchor_labels: Sequence[int],
                     candidates: Sequence[int],
                     centers: CenterSet,
                     coords3d: np.ndarray,
                     timestamps_ms: np.ndarray,
                     thres_t_s: float = DEFAULT_THRES_T_S,
                     cutoff: float = DEFAULT_CUTOFF) -> AugmentedSet:
    """
    Give each candidate with f_S <= cutoff the oracle label of its best anchor.

    Args:
        anchor_indices: Oracle-labelled windows (this iteration's core set
            plus earlier ledger entries).
        anchor_labels: Their oracle labels.
        candidates: Windows eligible for propagation (not self-labelled, not queried).
        centers: Current class centers.
        coords3d: N×3 embedding of the target training windows.
        timestamps_ms: Window start times.
        thres_t_s: Temporal scale in seconds.
        cutoff: Inclusion bound on f_S.

    Returns:
        AugmentedSet containing every anchor plus propagated members. A
        candidate matched by several anchors takes the one with the smallest
        f_S, then the lowest anchor index.
    """
    if thres_t_s <= 0:
        raise ConfigError(f"thres_t must be positive, got {thres_t_s}")
    anchors = np.asarray(anchor_indices, dtype=np.int64)
    labels = np.asarray(anchor_labels, dtype=np.int64)
    order = np.argsort(anchors, kind="stable")
    anchors, labels = anchors[order], labels[order]
    cands = np.asarray(sorted(set(int(c) for c in candidates) - set(anchors.tolist())), dtype=np.int64)
    coords = np.asarray(coords3d, dtype=np.float64)
    ts = np.asarray(timestamps_ms, dtype=np.float64)
    flags: List[str] = []

    best_f = np.full(len(cands), np.inf)
    best_src = np.full(len(cands), -1, dtype=np.int64)
    if len(anchors) and len(centers) and len(cands):
        anchor_centers = _anchor_centers(anchors, labels, coords, centers, flags)
        d_q = np.linalg.norm(coords[anchors] - anchor_centers, axis=1)
        usable = d_q > 0
        for index in anchors[~usable]:
            flags.append(f"anchor {int(index)}: lies on its center, propagation disabled")
        if usable.any():
            a_idx = np.flatnonzero(usable)
            for start in range(0, len(cands), CHUNK):
                block = cands[start:start + CHUNK]
                d_j = np.linalg.norm(coords[block][None, :, :] - anchor_centers[a_idx][:, None, :], axis=2)
                dt = np.abs(ts[anchors[a_idx]][:, None] - ts[block][None, :]) / 1000.0 / thres_t_s
                grid = d_j / d_q[a_idx][:, None] + dt
                # anchors are sorted, so argmin's first hit is the lowest anchor index
                pick = np.argmin(grid, axis=0)
                best_f[start:start + len(block)] = grid[pick, np.arange(len(block))]
                best_src[start:start + len(block)] = a_idx[pick]
    elif len(anchors) and not len(centers):
        flags.append("no centers available, propagation skipped")

    hit = best_f <= cutoff
    prop_idx = cands[hit]
    prop_src = best_src[hit]
    out = AugmentedSet(
        indices=np.concatenate([anchors, prop_idx]),
        labels=np.concatenate([labels, labels[prop_src]]) if len(prop_idx) else labels.copy(),
        provenance=[QUERIED] * len(anchors) + [PROPAGATED] * len(prop_idx),
        sources=np.concatenate([np.full(len(anchors), -1, dtype=np.int64), anchors[prop_src]]),
        f_s=np.concatenate([np.full(len(anchors), np.nan), best_f[hit]]),
        flags=flags,
    )
    if len(np.unique(out.indices)) != len(out):
        raise InvariantViolation("augmented set contains a window twice")
    for f in flags:
        logger.warning(f)
    logger.info(f"Augmented {len(anchors)} anchors with {len(prop_idx)} propagated windows")
    return out


def anchors_only(anchor_indices: Sequence[int], anchor_labels: Sequence[int]) -> AugmentedSet:
    """AugmentedSet holding just the oracle-labelled windows, for runs without propagation."""
    anchors = np.asarray(anchor_indices, dtype=np.int64)
    order = np.argsort(anchors, kind="stable")
    return AugmentedSet(
        indices=anchors[order],
        labels=np.asarray(anchor_labels, dtype=np.int64)[order],
        provenance=[QUERIED] * len(anchors),
        sources=np.full(len(anchors), -1, dtype=np.int64),
        f_s=np.full(len(anchors), np.nan),
    )
