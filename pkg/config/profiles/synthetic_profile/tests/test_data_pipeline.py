"""Tests for recording ingestion, windowing, LOSO splits and synthetic data.

Exercises the CSV layout, segmentation arithmetic, contiguous-block target
splits and the shifted-subject generator on small inputs with known answers.
"""

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st

from active_self.data import (
    DataManager,
    SplitSpec,
    SensorRecording,
    load_csv,
    loso_split,
    majority_labels,
    resample_recording,
    segment_all,
    segment_windows,
    synth_generate,
    window_count,
    write_csv,
)
from active_self.errors import ConfigError, DataError, EmptyOutputError, LookupFailure, SchemaError
from config.profiles.synthetic_profile.profile_config import SyntheticProfile

# Import common test utilities
from config.profiles.common_test_utils import (
    # Fixtures
    tiny_synth_config, synthetic_csv,

    # Data generators
    make_recording, make_window_set, create_sensor_csv, write_synthetic_csv,

    # Assertions
    assert_disjoint, assert_dataframe_structure,

    # Config helpers
    tiny_synth,
)


def _rows(labels, timestamps=None, subject="S01"):
    timestamps = timestamps if timestamps is not None else [10.0 * i for i in range(len(labels))]
    return [
        {"subject_id": subject, "timestamp_ms": t, "label": l, "ch_0": 0.1 * i, "ch_1": -0.2 * i}
        for i, (t, l) in enumerate(zip(timestamps, labels))
    ]


@pytest.mark.data
class TestSensorRecording:
    """Test construction-time validation of recordings."""

    def test_arrays_are_read_only(self):
        """Test that stored arrays cannot be mutated in place."""
        rec = make_recording()
        assert not rec.values.flags.writeable
        assert not rec.labels.flags.writeable
        with pytest.raises(ValueError):
            rec.values[0, 0] = 1.0

    def test_label_out_of_range_rejected(self):
        """Test that labels >= K raise DataError."""
        with pytest.raises(DataError):
            make_recording(n_steps=4, n_classes=2, labels=[0, 1, 2, 0])

    def test_rate_disagreeing_with_timestamps_rejected(self):
        """Test that a nominal rate far from the timestamp spacing raises DataError."""
        with pytest.raises(DataError):
            SensorRecording(
                subject_id="S01", sample_rate_hz=100.0, channel_names=("ch_0",),
                values=np.zeros((5, 1)), timestamps_ms=np.arange(5) * 20.0,
                labels=np.zeros(5), n_classes=1,
            )

    def test_channels_mapping(self):
        """Test that channels maps names to columns."""
        rec = make_recording(n_channels=2)
        np.testing.assert_array_equal(rec.channels["ch_1"], rec.values[:, 1])


@pytest.mark.data
class TestCsvIngestion:
    """Test the ingestion CSV reader."""

    def test_two_row_file_loads(self, tmp_path):
        """Test the smallest valid file: one subject, two timesteps."""
        path = create_sensor_csv(tmp_path, _rows([0, 1]))
        recordings = load_csv(path)
        assert len(recordings) == 1
        rec = recordings[0]
        assert rec.subject_id == "S01"
        assert rec.channel_names == ("ch_0", "ch_1")
        assert rec.sample_rate_hz == pytest.approx(100.0)
        assert rec.n_classes == 2

    def test_subjects_sorted(self, tmp_path):
        """Test that recordings come back in subject-id order."""
        rows = _rows([0, 1, 0], subject="S02") + _rows([1, 0, 1], subject="S01")
        recordings = load_csv(create_sensor_csv(tmp_path, rows))
        assert [r.subject_id for r in recordings] == ["S01", "S02"]

    def test_label_equal_to_k_rejected(self, tmp_path):
        """Test that a label equal to the class count raises DataError."""
        path = create_sensor_csv(tmp_path, _rows([0, 2]))
        with pytest.raises(DataError):
            load_csv(path, n_classes=2)

    def test_negative_and_fractional_labels_rejected(self, tmp_path):
        """Test that labels must be non-negative integers."""
        with pytest.raises(DataError):
            load_csv(create_sensor_csv(tmp_path, _rows([0, -1]), "neg.csv"))
        with pytest.raises(DataError):
            load_csv(create_sensor_csv(tmp_path, _rows([0, 0.5]), "frac.csv"))

    def test_missing_column_raises_schema_error(self, tmp_path):
        """Test that a file without the label column raises SchemaError."""
        rows = [{k: v for k, v in r.items() if k != "label"} for r in _rows([0, 1])]
        with pytest.raises(SchemaError):
            load_csv(create_sensor_csv(tmp_path, rows))

    def test_non_monotone_timestamps_rejected(self, tmp_path):
        """Test that time going backwards within a subject raises DataError."""
        path = create_sensor_csv(tmp_path, _rows([0, 1, 0], timestamps=[0.0, 20.0, 10.0]))
        with pytest.raises(DataError):
            load_csv(path)

    def test_missing_file(self, tmp_path):
        """Test that a missing path raises DataError."""
        with pytest.raises(DataError):
            load_csv(tmp_path / "absent.csv")

    def test_written_file_reads_back(self, tmp_path):
        """Test that write_csv produces the ingestion layout load_csv accepts."""
        rec = make_recording(n_steps=50, n_channels=3, n_classes=2)
        path = write_csv([rec], tmp_path / "out.csv")
        df = pd.read_csv(path)
        assert_dataframe_structure(df, ["subject_id", "timestamp_ms", "label", "ch_0", "ch_1", "ch_2"])
        back = load_csv(path, n_classes=2)[0]
        np.testing.assert_allclose(back.values, rec.values)
        np.testing.assert_array_equal(back.labels, rec.labels)


@pytest.mark.data
class TestWindowing:
    """Test sliding-window segmentation."""

    def test_window_count_examples(self):
        """Test 300 ms windows at 30 ms stride on 100 Hz recordings."""
        assert len(segment_windows(make_recording(n_steps=30), 300.0, 30.0)) == 1
        assert len(segment_windows(make_recording(n_steps=120), 300.0, 30.0)) == 31

    @settings(max_examples=200, deadline=None)
    @given(
        n_timesteps=st.integers(min_value=0, max_value=200),
        window=st.integers(min_value=1, max_value=50),
        stride_fraction=st.floats(min_value=0.01, max_value=1.0),
    )
    def test_window_count_matches_enumeration(self, n_timesteps, window, stride_fraction):
        """Test the count formula against enumerating every start."""
        stride = max(1, int(window * stride_fraction))
        starts = [s for s in range(0, n_timesteps, stride) if s + window <= n_timesteps]
        assert window_count(n_timesteps, window, stride) == len(starts)

    def test_window_contents_and_timestamps(self):
        """Test that window i holds timesteps [i·s, i·s + L) transposed to C×L."""
        rec = make_recording(n_steps=100, n_channels=3)
        windows = segment_windows(rec, 300.0, 30.0)
        assert windows.input_shape == (3, 30)
        for i in (0, 5, len(windows) - 1):
            start = int(windows.starts[i])
            assert start == 3 * i
            np.testing.assert_array_equal(windows.values[i], rec.values[start:start + 30].T)
            assert windows.timestamps_ms[i] == rec.timestamps_ms[start]

    def test_majority_label_ties(self):
        """Test ties: midpoint label when tied, otherwise lowest tied label."""
        rows = np.array([
            [0, 0, 0, 1, 1],
            [1, 1, 2, 0, 0],
            [0, 0, 1, 1, 2],
        ])
        assert majority_labels(rows, 3).tolist() == [0, 0, 1]
        assert majority_labels(np.array([[1, 0, 0, 1, 2, 2]]), 3).tolist() == [1]
        half = np.array([[0] * 15 + [1] * 15])
        assert majority_labels(half, 2).tolist() == [1]

    def test_stride_longer_than_window_rejected(self):
        """Test that stride > window raises ConfigError."""
        with pytest.raises(ConfigError):
            segment_windows(make_recording(), 30.0, 300.0)

    def test_short_recording(self):
        """Test that a recording shorter than one window raises EmptyOutputError."""
        with pytest.raises(EmptyOutputError):
            segment_windows(make_recording(n_steps=20), 300.0, 30.0)

    def test_segment_all_orders_subjects(self):
        """Test that windows are concatenated in subject-id order."""
        recs = [make_recording("S02", n_steps=60), make_recording("S01", n_steps=90)]
        windows = segment_all(recs, 300.0, 30.0)
        assert windows.subjects() == ["S01", "S02"]
        assert list(windows.subject_ids[:21]) == ["S01"] * 21
        assert list(windows.subject_ids[21:]) == ["S02"] * 11


@pytest.mark.data
class TestLosoSplit:
    """Test leave-one-subject-out splitting."""

    def test_three_to_four_block_ratio(self):
        """Test that 700 windows of one class split exactly 300/400."""
        windows = make_window_set({"S01": 700, "S02": 10}, n_classes=1)
        split = loso_split(windows, SplitSpec(target_subject="S01"))
        assert split.summary() == {"pretrain": 10, "target_train": 300, "target_test": 400}

    def test_partition_is_disjoint_and_complete(self):
        """Test that target windows are split without loss or overlap."""
        windows = make_window_set({"S01": 90, "S02": 30, "S03": 30})
        split = loso_split(windows, SplitSpec(target_subject="S02", seed=3))
        assert set(split.pretrain.subjects()) == {"S01", "S03"}
        train_starts = set(split.target_train.starts.tolist())
        test_starts = set(split.target_test.starts.tolist())
        assert_disjoint(train_starts, test_starts)
        assert len(train_starts | test_starts) == 30

    def test_blocks_are_contiguous(self):
        """Test that train windows of a class form whole contiguous blocks."""
        windows = make_window_set({"S01": 700, "S02": 10}, n_classes=1)
        split = loso_split(windows, SplitSpec(target_subject="S01", seed=5))
        starts = np.sort(split.target_train.starts) // 3
        runs = np.split(starts, np.flatnonzero(np.diff(starts) != 1) + 1)
        assert all(len(r) % 100 == 0 for r in runs)

    def test_deterministic_per_seed(self):
        """Test that the same seed yields the same split."""
        windows = make_window_set({"S01": 120, "S02": 20})
        a = loso_split(windows, SplitSpec(target_subject="S01", seed=9))
        b = loso_split(windows, SplitSpec(target_subject="S01", seed=9))
        np.testing.assert_array_equal(a.target_train.starts, b.target_train.starts)

    def test_purge_overlap(self):
        """Test that purged test windows do not overlap any train window."""
        windows = make_window_set({"S01": 140, "S02": 10}, length=5)
        split = loso_split(windows, SplitSpec(target_subject="S01", purge_overlap=True))
        train = split.target_train.starts
        for start in split.target_test.starts:
            assert np.min(np.abs(train - start)) >= 5

    def test_single_subject_rejected(self):
        """Test that one subject cannot form a LOSO split."""
        with pytest.raises(DataError):
            loso_split(make_window_set(30), SplitSpec(target_subject="S01"))

    def test_unknown_target(self):
        """Test that an unknown target raises LookupFailure."""
        windows = make_window_set({"S01": 30, "S02": 30})
        with pytest.raises(LookupFailure):
            loso_split(windows, SplitSpec(target_subject="S09"))


@pytest.mark.data
class TestSyntheticData:
    """Test the shifted-subject generator."""

    def test_layout(self, tiny_synth_config):
        """Test subject ids, lengths and class coverage."""
        recordings = synth_generate(tiny_synth_config)
        assert [r.subject_id for r in recordings] == ["S01", "S02", "S03"]
        for rec in recordings:
            assert rec.n_timesteps == 1200
            assert rec.n_channels == 4
            assert set(np.unique(rec.labels).tolist()) == {0, 1, 2}

    def test_deterministic(self, tiny_synth_config):
        """Test that the output is a pure function of the config."""
        a = synth_generate(tiny_synth_config)
        b = synth_generate(tiny_synth_config)
        for ra, rb in zip(a, b):
            np.testing.assert_array_equal(ra.values, rb.values)
            np.testing.assert_array_equal(ra.labels, rb.labels)

    def test_zero_shift_shares_distribution(self):
        """Test that without shift or noise, equal labels at equal times give equal values."""
        config = tiny_synth(shift_magnitude=0.0, noise_std=0.0, bouts_per_class=20)
        first, second = synth_generate(config)[:2]
        same = first.labels == second.labels
        assert same.any()
        np.testing.assert_allclose(first.values[same], second.values[same])

    def test_shift_separates_subjects(self):
        """Test that a positive shift changes per-subject channel means."""
        first, second = synth_generate(tiny_synth(shift_magnitude=1.0, noise_std=0.0))[:2]
        assert not np.allclose(first.values.mean(axis=0), second.values.mean(axis=0))

    def test_invalid_config(self):
        """Test that fewer than two classes raises ConfigError."""
        with pytest.raises(ConfigError):
            synth_generate(tiny_synth(n_classes=1))


@pytest.mark.data
class TestResampling:
    """Test rate conversion."""

    def test_linear_values_and_nearest_labels(self):
        """Test 50 Hz to 100 Hz: midpoints interpolate, label ties go earlier."""
        rec = make_recording(n_steps=5, n_channels=1, n_classes=2, sample_rate_hz=50.0, labels=[0, 0, 1, 1, 1])
        out = resample_recording(rec, 100.0)
        assert out.n_timesteps == 9
        np.testing.assert_allclose(out.timestamps_ms, np.arange(9) * 10.0)
        assert out.values[1, 0] == pytest.approx((rec.values[0, 0] + rec.values[1, 0]) / 2)
        assert out.labels.tolist() == [0, 0, 0, 0, 1, 1, 1, 1, 1]
        assert out.metadata["resampled_from_hz"] == "50.0"

    @settings(max_examples=200, deadline=None)
    @given(source_rate=st.sampled_from([25.0, 50.0, 100.0, 200.0]),
           target_rate=st.sampled_from([20.0, 50.0, 100.0, 250.0]),
           n_steps=st.integers(min_value=20, max_value=80),
           data=st.data())
    def test_label_boundary_moves_at_most_one_output_step(self, source_rate, target_rate, n_steps, data):
        """Test that a single label change lands within one output step of where it was."""
        boundary = data.draw(st.integers(min_value=1, max_value=n_steps // 2))
        rec = make_recording(n_steps=n_steps, n_channels=1, n_classes=2, sample_rate_hz=source_rate,
                             labels=[0] * boundary + [1] * (n_steps - boundary))
        out = resample_recording(rec, target_rate)
        step = 1000.0 / target_rate
        t_last_zero, t_first_one = rec.timestamps_ms[boundary - 1], rec.timestamps_ms[boundary]

        ones = np.flatnonzero(out.labels == 1)
        first = int(ones[0]) if len(ones) else len(out.labels)
        assert np.all(out.labels[:first] == 0) and np.all(out.labels[first:] == 1)
        assert np.all(out.timestamps_ms[:first] <= t_first_one)
        if len(ones):
            assert t_last_zero < out.timestamps_ms[first] <= t_first_one + step + 1e-9
        else:
            assert out.timestamps_ms[-1] > t_first_one - step - 1e-9

    def test_invalid_rate(self):
        """Test that a non-positive target rate raises DataError."""
        with pytest.raises(DataError):
            resample_recording(make_recording(), 0.0)


@pytest.mark.data
class TestDataManager:
    """Test profile-driven loading."""

    def test_loads_profile_csv(self, synthetic_csv, tiny_synth_config):
        """Test loading the profile CSV into one recording per subject."""
        manager = DataManager(SyntheticProfile(csv_file=synthetic_csv, synth=tiny_synth_config))
        recordings = manager.load_recordings()
        assert len(recordings) == 3
        stats = manager.get_stats()
        assert stats["subjects"] == ["S01", "S02", "S03"]
        assert stats["channels"] == 4
        assert stats["timesteps"]["S01"] == 1200

    def test_resamples_to_profile_rate(self, tmp_path):
        """Test that 50 Hz recordings are brought to the profile's 100 Hz."""
        path = write_synthetic_csv(tiny_synth(sample_rate_hz=50.0), tmp_path, "slow.csv")
        manager = DataManager(SyntheticProfile(csv_file=path, synth=tiny_synth()))
        rec = manager.load_recordings()[0]
        assert rec.sample_rate_hz == 100.0
        assert rec.n_timesteps == 1199

    def test_missing_channels(self, tmp_path):
        """Test that a CSV lacking profile channels raises SchemaError."""
        path = write_synthetic_csv(tiny_synth(n_channels=2), tmp_path, "narrow.csv")
        with pytest.raises(SchemaError):
            DataManager(SyntheticProfile(csv_file=path, synth=tiny_synth())).load_recordings()

    def test_stats_before_load(self, tiny_synth_config):
        """Test that stats need loaded data."""
        with pytest.raises(ValueError):
            DataManager(SyntheticProfile(synth=tiny_synth_config)).get_stats()
