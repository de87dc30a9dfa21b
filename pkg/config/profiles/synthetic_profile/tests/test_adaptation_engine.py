"""Tests for the iterative adaptation loop."""

from dataclasses import replace

import numpy as np
import pytest

from active_self.classifier import build
from active_self.engine import AdaptationEngine, run_adaptation, run_iteration
from active_self.errors import ConfigError
from active_self.evaluation import query_budget
from active_self.pipeline import AdaptationReport, RunConfig, write_snapshot
from active_self.selection import CenterSet, OracleLedger

# Import common test utilities
from config.profiles.common_test_utils import (
    # Fixtures
    tiny_synth_config, tiny_windows, tiny_split, tiny_architecture, source_model,

    # Assertions
    assert_snapshot_structure, assert_feature_stack_unchanged,
)


def _config(**changes):
    base = dict(epochs=2, max_iterations=2, n_per_boundary=5, batch_size=32, learning_rate=5e-3, seed=3)
    base.update(changes)
    return RunConfig(**base)


@pytest.mark.unit
class TestRunConfig:
    """Test run settings and variant gating."""

    def test_variant_steps(self):
        """Test which steps each variant runs."""
        assert RunConfig(variant="activeself").steps == (1, 2, 3, 4)
        assert RunConfig(variant="sub_slss").runs(2) and not RunConfig(variant="sub_slss").runs(3)
        assert not RunConfig(variant="sub_ust").runs(2)
        assert RunConfig(variant="fullft").steps == (4,)

    @pytest.mark.parametrize("changes", [
        {"variant": "oracle_only"},
        {"max_iterations": 0},
        {"base_threshold": 1.0},
        {"n_per_boundary": 0},
        {"thres_t_s": 0.0},
        {"selection": "random"},
    ])
    def test_invalid(self, changes):
        """Test that invalid settings raise ConfigError."""
        with pytest.raises(ConfigError):
            RunConfig(**changes)

    def test_overrides_skip_none(self):
        """Test that None leaves a setting alone."""
        config = RunConfig(seed=4).with_overrides(seed=None, epochs=7)
        assert config.seed == 4 and config.epochs == 7
        assert RunConfig.from_dict({**config.to_dict(), "unknown": 1}) == config


@pytest.mark.integration
@pytest.mark.slow
class TestAdaptationLoop:
    """Test the teacher/student chain over several iterations."""

    def test_snapshots_and_chaining(self, source_model, tiny_split):
        """Test that each iteration starts from the previous student."""
        before = source_model.digest()
        student, report = run_adaptation(source_model, tiny_split, _config())
        assert source_model.digest() == before
        assert len(report.iterations) == 2
        for snapshot in report.iterations:
            assert_snapshot_structure(snapshot)
            assert snapshot.new_queries <= query_budget(5, 3)
        assert report.iterations[0].teacher_digest == before
        assert report.iterations[1].teacher_digest == report.iterations[0].student_digest
        assert report.final_digest == student.digest()
        assert report.n_train == len(tiny_split.target_train)
        assert report.n_total == tiny_split.target_total
        assert report.cumulative_queries == sorted(report.cumulative_queries)
        assert_feature_stack_unchanged(source_model, student)

    def test_thresholds_follow_schedule(self, source_model, tiny_split):
        """Test the per-iteration confidence threshold."""
        _, report = run_adaptation(source_model, tiny_split, _config(base_threshold=0.4))
        assert [s.threshold for s in report.iterations] == [pytest.approx(0.4), pytest.approx(0.45)]

    def test_self_training_only_never_queries(self, source_model, tiny_split):
        """Test that the self-training ablation asks the oracle nothing."""
        _, report = run_adaptation(source_model, tiny_split, _config(variant="sub_ust", base_threshold=0.6))
        assert all(s.new_queries == 0 for s in report.iterations)
        assert report.cumulative_queries == [0, 0]
        assert all(s.augmented is None for s in report.iterations)

    def test_no_propagation_variant(self, source_model, tiny_split):
        """Test that querying without propagation adds only queried windows."""
        _, report = run_adaptation(source_model, tiny_split, _config(variant="sub_slss", base_threshold=0.6))
        for snapshot in report.iterations:
            assert "propagated" not in snapshot.pool_composition
            if snapshot.augmented is not None:
                assert snapshot.augmented["propagated"] == 0

    def test_full_fine_tuning(self, source_model, tiny_split):
        """Test that the upper bound labels every training window."""
        _, report = run_adaptation(source_model, tiny_split, _config(variant="fullft", max_iterations=1))
        snapshot = report.iterations[0]
        n_train = len(tiny_split.target_train)
        assert snapshot.phase_order == ["select", "fine_tune"]
        assert snapshot.cumulative_queries == n_train
        assert snapshot.pool_composition == {"queried": n_train}
        assert snapshot.labeled_percentage == pytest.approx(100.0 * n_train / tiny_split.target_total)

    def test_deterministic(self, source_model, tiny_split):
        """Test that identical inputs give identical reports apart from timing."""
        _, first = run_adaptation(source_model, tiny_split, _config())
        _, second = run_adaptation(source_model, tiny_split, _config())
        assert first.to_dict(include_timing=False) == second.to_dict(include_timing=False)

    def test_test_labels_do_not_leak(self, source_model, tiny_split):
        """Test that shuffling the test labels leaves every student unchanged."""
        test = tiny_split.target_test
        shuffled = replace(test, labels=np.random.default_rng(0).permutation(test.labels))
        config = _config()
        _, original = AdaptationEngine(config, tiny_split.target_train, test).run_adaptation(source_model)
        _, permuted = AdaptationEngine(config, tiny_split.target_train, shuffled).run_adaptation(source_model)
        assert original.final_digest == permuted.final_digest
        assert [s.student_digest for s in original.iterations] == [s.student_digest for s in permuted.iterations]

    def test_report_round_trip(self, source_model, tiny_split, tmp_path):
        """Test report serialisation and snapshot files."""
        _, report = run_adaptation(source_model, tiny_split, _config(max_iterations=1))
        restored = AdaptationReport.from_dict(report.to_dict())
        assert restored.to_dict() == report.to_dict()
        path = write_snapshot(report.iterations[0], tmp_path)
        assert path.name == "iteration_01.json"


@pytest.mark.integration
class TestDegenerateIterations:
    """Test iterations where the pool cannot be built normally."""

    def _zero_model(self, tiny_architecture):
        # uniform predictions and all-zero features
        return build(tiny_architecture, seed=0, init="zeros")

    def test_empty_self_training_set(self, tiny_architecture, tiny_split):
        """Test that nothing confident and no centers keeps the teacher."""
        teacher = self._zero_model(tiny_architecture)
        result = run_iteration(teacher, tiny_split.target_train, OracleLedger(), _config(base_threshold=0.5), 1)
        flags = result.snapshot.flags
        for flag in ("empty_self_training_set", "insufficient_centers",
                     "empty_pool_fine_tune_skipped", "pca_rank_deficient"):
            assert flag in flags
        assert result.student is teacher
        assert result.snapshot.center_source == "none"
        assert result.snapshot.pool_size == 0
        assert_snapshot_structure(result.snapshot)

    def test_previous_centers_reused(self, tiny_architecture, tiny_split):
        """Test the fallback to the last iteration's centers."""
        teacher = self._zero_model(tiny_architecture)
        previous = CenterSet(np.array([0, 1]), np.array([0, 1]), np.zeros((2, 3)))
        ledger = OracleLedger()
        result = run_iteration(teacher, tiny_split.target_train, ledger, _config(base_threshold=0.5), 1,
                               previous_centers=previous)
        snapshot = result.snapshot
        assert snapshot.center_source == "previous"
        assert "centers_from_previous_iteration" in snapshot.flags
        # every window sits on both centers: all scores tie, lowest indices win
        assert "duplicate_centers" in snapshot.flags
        assert snapshot.new_queries == 5
        assert ledger.indices().tolist() == [0, 1, 2, 3, 4]
        np.testing.assert_array_equal(ledger.label_array(), tiny_split.target_train.labels[:5])
        assert snapshot.pool_composition == {"queried": 5}
        assert snapshot.fine_tuned
        assert_feature_stack_unchanged(teacher, result.student)
