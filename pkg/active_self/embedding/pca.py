"""Three-component PCA over penultimate-layer features."""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from config.logging_config import get_pipeline_logger
from ..errors import DataError, DimensionError

logger = get_pipeline_logger()

N_COMPONENTS = 3
RANK_TOLERANCE = 1e-10


@dataclass
class PcaModel:
    """
    mean: D-vector; components: 3×D with orthonormal rows, ordered by
    decreasing eigenvalue; explained_variance: fraction of total variance per
    component. ``rank_deficient`` marks fits where fewer than three
    directions carried variance and the basis was completed arbitrarily.
    """
    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    rank_deficient: bool = False

    @property
    def n_features(self) -> int:
        return int(self.mean.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
            "rank_deficient": self.rank_deficient,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PcaModel":
        return cls(
            mean=np.asarray(data["mean"], dtype=np.float64),
            components=np.asarray(data["components"], dtype=np.float64),
            explained_variance=np.asarray(data["explained_variance"], dtype=np.float64),
            rank_deficient=bool(data.get("rank_deficient", False)),
        )


def _orient(vectors: np.ndarray) -> np.ndarray:
    """Flip each row so its largest-magnitude coordinate is positive (first one on ties)."""
    out = vectors.copy()
    for i, row in enumerate(out):
        if row[np.argmax(np.abs(row))] < 0:
            out[i] = -row
    return out


def _complete_basis(basis: np.ndarray, dim: int, needed: int) -> np.ndarray:
    """Extend orthonormal rows ``basis`` with ``needed`` more orthonormal rows via Gram-Schmidt on unit vectors."""
    rows = [r for r in basis]
    for axis in range(dim):
        if len(rows) == basis.shape[0] + needed:
            break
        v = np.zeros(dim)
        v[axis] = 1.0
        for r in rows:
            v = v - (v @ r) * r
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            rows.append(v / norm)
    return np.asarray(rows[basis.shape[0]:], dtype=np.float64)


def pca_fit(features: np.ndarray) -> PcaModel:
    """
    Fit the top-3 principal directions of ``features`` (N×D, N >= 4, D >= 3).

    Components come from the eigendecomposition of the covariance of the
    mean-centered data. When the data has rank < 3 the basis is completed with
    arbitrary orthonormal directions and the model is flagged.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"pca_fit expects an N×D matrix, got shape {x.shape}")
    n, d = x.shape
    if n < 4 or d < N_COMPONENTS:
        raise DataError(f"pca_fit needs N >= 4 and D >= {N_COMPONENTS}, got N={n}, D={d}")

    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    eigenvectors = eigenvectors[:, order]

    total = float(eigenvalues.sum())
    rank = int(np.sum(eigenvalues > RANK_TOLERANCE * eigenvalues[0])) if total > 0 else 0
    kept = min(rank, N_COMPONENTS)

    components = eigenvectors[:, :kept].T
    rank_deficient = kept < N_COMPONENTS
    if rank_deficient:
        logger.warning(f"PCA input has rank {rank} < {N_COMPONENTS}; completing the basis with arbitrary directions")
        components = np.vstack([components, _complete_basis(components, d, N_COMPONENTS - kept)])
    components = _orient(components)

    if total > 0:
        explained = np.concatenate([eigenvalues[:kept], np.zeros(N_COMPONENTS - kept)]) / total
    else:
        explained = np.zeros(N_COMPONENTS)
    return PcaModel(mean=mean, components=components, explained_variance=explained, rank_deficient=rank_deficient)


def pca_transform(model: PcaModel, features: np.ndarray) -> np.ndarray:
    """(features − mean) · componentsᵀ, an N×3 matrix."""
    x = np.asarray(features, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != model.n_features:
        raise DimensionError(f"pca_transform expects {model.n_features} features, got shape {np.shape(features)}")
    coords = (x - model.mean) @ model.components.T
    return coords[0] if single else coords
