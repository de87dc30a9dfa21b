"""Custom assertion helpers for testing.

This module provides custom assertion functions that make tests more
readable and reduce code duplication across different profile tests.
"""

from typing import Any, Dict, Iterable, List

import numpy as np
import pandas as pd

from active_self.classifier import HarModel
from active_self.pipeline import IterationSnapshot


def assert_probabilities(probs: np.ndarray, tolerance: float = 1e-6) -> None:
    """Validate that every row is a probability distribution with entries in (0, 1).

    Args:
        probs: N×K matrix to validate
        tolerance: Allowed deviation of each row sum from 1

    Raises:
        AssertionError: If a row is not a distribution
    """
    probs = np.asarray(probs)
    assert probs.ndim == 2, f"Expected an N×K matrix, got shape {probs.shape}"
    assert np.all(np.abs(probs.sum(axis=1) - 1.0) <= tolerance), "Rows should sum to 1"
    assert np.all(probs > 0) and np.all(probs < 1), "Entries should lie strictly inside (0, 1)"


def assert_disjoint(*index_sets: Iterable[int]) -> None:
    """Validate that the given index collections share no element."""
    seen: Dict[int, int] = {}
    for position, indices in enumerate(index_sets):
        for index in indices:
            index = int(index)
            assert index not in seen, f"Index {index} appears in sets {seen[index]} and {position}"
            seen[index] = position


def assert_feature_stack_unchanged(before: HarModel, after: HarModel) -> None:
    """Validate that every feature-stack parameter is byte-identical between two models."""
    assert before.feature_stack_names() == after.feature_stack_names()
    assert before.feature_digest() == after.feature_digest(), "Feature stack parameters changed"
    old, new = before.network.parameters(), after.network.parameters()
    for name in before.feature_stack_names():
        assert old[name].tobytes() == new[name].tobytes(), f"Parameter {name} changed"


def assert_snapshot_structure(snapshot: IterationSnapshot) -> None:
    """Validate that a snapshot is internally consistent.

    Args:
        snapshot: Snapshot of one adaptation iteration

    Raises:
        AssertionError: If counts or phase ordering disagree
    """
    assert snapshot.iteration >= 1
    assert snapshot.pool_size == len(snapshot.pool_indices)
    assert snapshot.pool_size == sum(snapshot.pool_composition.values())
    assert snapshot.pool_indices == sorted(set(snapshot.pool_indices)), "Pool indices should be unique and sorted"
    assert snapshot.cumulative_queries == snapshot.ledger.get("count", 0)
    assert 0.0 <= snapshot.labeled_percentage <= 100.0
    if snapshot.fine_tuned:
        assert snapshot.phase_order[-1] == "fine_tune", "Fine-tuning should be the last phase"
        assert snapshot.feature_digest, "Fine-tuned snapshots should record the feature digest"


def assert_dataframe_structure(df: pd.DataFrame, expected_columns: List[str]) -> None:
    """Validate that a DataFrame has the expected structure.

    Args:
        df: DataFrame to validate
        expected_columns: List of expected column names

    Raises:
        AssertionError: If DataFrame structure is invalid
    """
    assert isinstance(df, pd.DataFrame), "Should be a pandas DataFrame"
    for col in expected_columns:
        assert col in df.columns, f"DataFrame missing expected column: {col}"


def assert_profile_configuration(profile: Any, expected_attributes: List[str]) -> None:
    """Validate that a profile has the expected configuration.

    Args:
        profile: Profile instance to validate
        expected_attributes: List of expected attribute names

    Raises:
        AssertionError: If profile configuration is invalid
    """
    for attr in expected_attributes:
        assert hasattr(profile, attr), f"Profile missing expected attribute: {attr}"
    assert len(profile.channel_names) == profile.n_channels
    assert len(profile.class_names) == profile.n_classes
    assert profile.sample_rate_hz > 0
    assert 0.0 <= profile.base_threshold < 1.0
