"""Boundary-stratified query selection and the label oracle."""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config.logging_config import get_pipeline_logger
from ..errors import ConfigError, DataError, InsufficientCentersError, OracleError
from .selftrain import CenterSet

logger = get_pipeline_logger()

SELECTION_ORDERS = ("lowest", "highest")
DEFAULT_PER_BOUNDARY = 10


@dataclass(frozen=True)
class DistanceVector:
    """Distances from one window to every center, plus its two nearest classes."""
    index: int
    distances: np.ndarray
    nearest: int
    second: int
    d_n: float
    d_sn: float


@dataclass
class DistanceTable:
    """
    Column-stored distance vectors for a candidate set.

    ``distances`` is N×M over the M centers in ascending class order;
    ``nearest``/``second`` hold class ids, not column positions.
    """
    indices: np.ndarray
    center_classes: np.ndarray
    distances: np.ndarray
    nearest: np.ndarray
    second: np.ndarray
    d_n: np.ndarray
    d_sn: np.ndarray

    def __len__(self) -> int:
        return int(len(self.indices))

    def __getitem__(self, i: int) -> DistanceVector:
        return DistanceVector(
            index=int(self.indices[i]),
            distances=self.distances[i],
            nearest=int(self.nearest[i]),
            second=int(self.second[i]),
            d_n=float(self.d_n[i]),
            d_sn=float(self.d_sn[i]),
        )

    def __iter__(self) -> Iterator[DistanceVector]:
        for i in range(len(self)):
            yield self[i]


def distance_vectors(indices: Sequence[int], coords3d: np.ndarray, centers: CenterSet) -> DistanceTable:
    """
    Euclidean distances from each candidate window to each center.

    Args:
        indices: Candidate window indices (T minus S).
        coords3d: Full N×3 embedding of the target training windows.
        centers: Class centers; at least two are needed.

    Raises:
        InsufficientCentersError: fewer than two centers.
    """
    if len(centers) < 2:
        raise InsufficientCentersError(f"Boundary scoring needs at least 2 centers, got {len(centers)}")
    idx = np.asarray(indices, dtype=np.int64)
    pts = np.asarray(coords3d, dtype=np.float64)[idx]
    dist = np.linalg.norm(pts[:, None, :] - centers.coords[None, :, :], axis=2)
    # stable sort: equal distances keep ascending class order
    order = np.argsort(dist, axis=1, kind="stable")
    rows = np.arange(len(idx))
    return DistanceTable(
        indices=idx,
        center_classes=centers.classes.copy(),
        distances=dist,
        nearest=centers.classes[order[:, 0]],
        second=centers.classes[order[:, 1]],
        d_n=dist[rows, order[:, 0]],
        d_sn=dist[rows, order[:, 1]],
    )


def informativeness_scores(d_n: np.ndarray, d_sn: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    f_I = (d_sn − d_n) / d_sn for each pair.

    Returns:
        (scores, degenerate) where ``degenerate`` marks d_sn = 0 entries, scored 0.
    """
    d_n = np.asarray(d_n, dtype=np.float64)
    d_sn = np.asarray(d_sn, dtype=np.float64)
    degenerate = d_sn == 0
    safe = np.where(degenerate, 1.0, d_sn)
    scores = np.where(degenerate, 0.0, (d_sn - d_n) / safe)
    return scores, degenerate


def informativeness(dv: DistanceVector) -> float:
    """Margin score in [0, 1): 0 on a boundary, approaching 1 at a center."""
    scores, degenerate = informativeness_scores(np.array([dv.d_n]), np.array([dv.d_sn]))
    if degenerate[0]:
        logger.warning(f"Window {dv.index}: second-nearest center at distance 0 (duplicate centers); f_I set to 0")
    return float(scores[0])


@dataclass
class BoundaryCategory:
    """Windows whose two nearest classes are the pair (a, b), a < b."""
    pair: Tuple[int, int]
    members: np.ndarray


def boundary_categories(table: DistanceTable) -> List[BoundaryCategory]:
    """Group candidates by unordered {nearest, second} pair, pairs in ascending order."""
    lo = np.minimum(table.nearest, table.second)
    hi = np.maximum(table.nearest, table.second)
    out = []
    for a, b in sorted(set(zip(lo.tolist(), hi.tolist()))):
        rows = np.flatnonzero((lo == a) & (hi == b))
        out.append(BoundaryCategory(pair=(int(a), int(b)), members=rows))
    return out


class GroundTruthOracle:
    """Answers label queries from hidden ground truth and counts every call."""

    def __init__(self, labels: np.ndarray):
        self._labels = np.asarray(labels, dtype=np.int64)
        self.calls = 0

    def __len__(self) -> int:
        return int(len(self._labels))

    def __call__(self, index: int) -> int:
        if not 0 <= int(index) < len(self._labels):
            raise OracleError(f"Oracle index {index} outside the target training set [0, {len(self._labels)})")
        self.calls += 1
        return int(self._labels[int(index)])


@dataclass
class OracleLedger:
    """Every oracle answer so far; labels are immutable once recorded."""
    labels: Dict[int, int] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.labels)

    def __contains__(self, index: int) -> bool:
        return int(index) in self.labels

    def record(self, index: int, label: int) -> None:
        index, label = int(index), int(label)
        known = self.labels.get(index)
        if known is not None and known != label:
            raise OracleError(f"Ledger already holds label {known} for window {index}, refusing {label}")
        self.labels[index] = label

    def indices(self) -> np.ndarray:
        return np.asarray(sorted(self.labels), dtype=np.int64)

    def label_array(self) -> np.ndarray:
        return np.asarray([self.labels[i] for i in sorted(self.labels)], dtype=np.int64)

    def copy(self) -> "OracleLedger":
        return OracleLedger(dict(self.labels))

    def to_dict(self) -> Dict[str, Any]:
        return {"count": self.count, "labels": {str(k): v for k, v in sorted(self.labels.items())}}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OracleLedger":
        return cls({int(k): int(v) for k, v in data.get("labels", {}).items()})


def oracle_query(ledger: OracleLedger, index: int, oracle: Callable[[int], int]) -> int:
    """Label of ``index``: from the ledger when known, otherwise asked once and recorded."""
    if index in ledger:
        return ledger.labels[int(index)]
    label = oracle(int(index))
    ledger.record(index, label)
    return label


@dataclass
class CoreSet:
    """Windows queried this iteration, their oracle labels, f_I scores and categories."""
    indices: np.ndarray
    labels: np.ndarray
    scores: np.ndarray
    categories: List[Tuple[int, int]]
    degenerate: int = 0

    def __len__(self) -> int:
        return int(len(self.indices))

    def per_category(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for a, b in self.categories:
            key = f"{a}-{b}"
            counts[key] = counts.get(key, 0) + 1
        return counts

    @classmethod
    def empty(cls) -> "CoreSet":
        return cls(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0), [])


def select_core_set(table: DistanceTable,
                    n_per_boundary: int,
                    oracle: Callable[[int], int],
                    ledger: OracleLedger,
                    selection: str = "lowest") -> CoreSet:
    """
    Query up to ``n_per_boundary`` windows per boundary category.

    ``selection="lowest"`` takes the smallest f_I (closest to a boundary);
    ``"highest"`` takes the largest. Ties go to the lower window index.
    Windows already in the ledger are never queried again. Queries are
    staged and written to the ledger only once all succeed, so an oracle
    failure leaves the ledger as it was.
    """
    if n_per_boundary < 1:
        raise ConfigError(f"per-boundary budget must be >= 1, got {n_per_boundary}")
    if selection not in SELECTION_ORDERS:
        raise ConfigError(f"selection must be one of {SELECTION_ORDERS}, got '{selection}'")
    if len(table) == 0:
        raise DataError("select_core_set needs at least one candidate")

    scores, degenerate = informativeness_scores(table.d_n, table.d_sn)
    if degenerate.any():
        logger.warning(f"{int(degenerate.sum())} candidates had d_sn = 0 (duplicate centers); scored f_I = 0")
    fresh = np.array([int(i) not in ledger for i in table.indices], dtype=bool)

    chosen_rows: List[int] = []
    chosen_cats: List[Tuple[int, int]] = []
    for category in boundary_categories(table):
        rows = category.members[fresh[category.members]]
        if len(rows) == 0:
            continue
        key = scores[rows] if selection == "lowest" else -scores[rows]
        ranked = rows[np.lexsort((table.indices[rows], key))][:n_per_boundary]
        chosen_rows.extend(int(r) for r in ranked)
        chosen_cats.extend([category.pair] * len(ranked))

    staged: Dict[int, int] = {}
    for r in chosen_rows:
        index = int(table.indices[r])
        staged[index] = int(oracle(index))
    for index, label in staged.items():
        ledger.record(index, label)

    rows = np.asarray(chosen_rows, dtype=np.int64)
    core = CoreSet(
        indices=table.indices[rows] if len(rows) else np.zeros(0, dtype=np.int64),
        labels=np.asarray([staged[int(table.indices[r])] for r in rows], dtype=np.int64),
        scores=scores[rows] if len(rows) else np.zeros(0),
        categories=chosen_cats,
        degenerate=int(degenerate.sum()),
    )
    for index, label, score, cat in zip(core.indices, core.labels, core.scores, core.categories):
        logger.debug(f"query window {int(index)} category {cat} f_I {float(score):.6f} -> label {int(label)}")
    logger.info(
        f"Queried {len(core)} windows over {len(core.per_category())} boundary categories "
        f"(ledger now {ledger.count})"
    )
    return core
