"""Tests for configuration loading, profiles and the command-line verbs."""

import json

import pytest

from active_self.errors import ConfigError
from active_self.evaluation import ShiftCalibration
from cli.app import main
from config.profiles.profile_factory import ProfileFactory
from config.profiles.synthetic_profile import SyntheticProfile
from config.settings import apply_profile_defaults, load_config, load_profile

# Import common test utilities
from config.profiles.common_test_utils import (
    # Fixtures
    output_dir,

    # Assertions
    assert_profile_configuration,

    # Config helpers
    TINY_HIDDEN, fast_overrides, write_config_file, create_test_profile, tiny_synth,
)


@pytest.mark.unit
class TestLoadConfig:
    """Test the flat key=value configuration layer."""

    def test_defaults(self):
        """Test loading with neither file nor overrides."""
        config = load_config()
        assert config.profile_name == "synthetic_profile"
        assert config.seed == 0
        assert config.run.variant == "activeself"
        assert config.split.train_parts == 3 and config.split.test_parts == 4

    def test_file_and_override_precedence(self, tmp_path):
        """Test that overrides win over the file and None overrides are ignored."""
        path = write_config_file(tmp_path, {"run.epochs": "4", "run.variant": "sub_slss", "hidden": "16,8"})
        config = load_config(path, {"run.epochs": "6", "run.variant": None})
        assert config.run.epochs == 6
        assert config.run.variant == "sub_slss"
        assert config.hidden == (16, 8)

    @pytest.mark.parametrize("values", [
        {"bogus": "1"},
        {"model.depth": "3"},
        {"run.depth": "3"},
        {"run.epochs": "abc"},
        {"run.variant": "bogus"},
        {"split.purge_overlap": "maybe"},
        {"synth.n_classes": "1"},
    ])
    def test_invalid_values(self, values):
        """Test unknown keys and sections, bad types and failed validation."""
        with pytest.raises(ConfigError):
            load_config(overrides=values)

    def test_missing_file(self, tmp_path):
        """Test that a missing config file is a configuration error."""
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.env")

    @pytest.mark.parametrize("raw, expected", [("yes", True), ("On", True), ("0", False), ("false", False)])
    def test_boolean_values(self, raw, expected):
        """Test the accepted spellings of booleans."""
        assert load_config(overrides={"split.purge_overlap": raw}).split.purge_overlap is expected

    def test_synth_seed_follows_root_seed(self):
        """Test that the generator seed tracks the root seed unless set."""
        assert load_config(overrides={"seed": "5"}).synth.seed == 5
        assert load_config(overrides={"seed": "5", "synth.seed": "2"}).synth.seed == 2

    def test_config_hash(self):
        """Test that the hash identifies the effective configuration."""
        first = load_config(overrides={"seed": "1"})
        assert first.config_hash() == load_config(overrides={"seed": "1"}).config_hash()
        assert first.config_hash() != load_config(overrides={"seed": "2"}).config_hash()


@pytest.mark.unit
class TestProfileDefaults:
    """Test defaults owned by the dataset profile."""

    def test_dsads_regime(self):
        """Test that the DSADS profile sets its architecture and training regime."""
        config = apply_profile_defaults(load_config(), create_test_profile("dsads_profile"))
        assert config.architecture == "double_stream"
        assert config.train.learning_rate == pytest.approx(1e-5)
        assert config.train.batch_size == 512
        assert config.run.learning_rate == pytest.approx(1e-5)
        assert config.run.batch_size == 512

    def test_synthetic_selection_regime(self):
        """Test the synthetic threshold and per-boundary budget, and that explicit values win."""
        profile = SyntheticProfile(synth=tiny_synth())
        config = apply_profile_defaults(load_config(), profile)
        assert config.run.base_threshold == pytest.approx(0.8)
        assert config.run.n_per_boundary == 5
        config = apply_profile_defaults(load_config(overrides={"run.base_threshold": "0.5"}), profile)
        assert config.run.base_threshold == pytest.approx(0.5)

    def test_explicit_keys_kept(self):
        """Test that user-set keys are not replaced by profile values."""
        config = load_config(overrides={"train.batch_size": "16", "architecture": "mlp"})
        config = apply_profile_defaults(config, create_test_profile("dsads_profile"))
        assert config.train.batch_size == 16
        assert config.run.batch_size == 512
        assert config.architecture == "mlp"

    def test_synthetic_architecture(self, tmp_path):
        """Test the network configuration derived from the synthetic profile."""
        config = load_config(overrides=fast_overrides(str(tmp_path / "s.csv")))
        profile = load_profile(config)
        config = apply_profile_defaults(config, profile)
        arch = config.architecture_config(profile)
        assert arch.name == "mlp"
        assert arch.input_shape == (4, 30)
        assert arch.n_classes == 3
        assert arch.hidden == TINY_HIDDEN


@pytest.mark.unit
class TestProfiles:
    """Test profile discovery and the synthetic profile."""

    def test_discovery(self):
        """Test that every dataset profile package is found."""
        ProfileFactory.refresh()
        available = ProfileFactory.get_available_profiles()
        for name in ("synthetic_profile", "dsads_profile", "pamap_profile", "emg_profile"):
            assert name in available

    def test_unknown_profile(self):
        """Test that an unknown name is a configuration error."""
        with pytest.raises(ConfigError):
            ProfileFactory.create_profile("nonexistent_profile")
        with pytest.raises(ConfigError):
            load_profile(load_config(overrides={"profile_name": "nonexistent_profile"}))

    def test_synthetic_profile(self):
        """Test schema and regime of the synthetic profile."""
        profile = SyntheticProfile(csv_file="x.csv", synth=tiny_synth())
        assert_profile_configuration(profile, ["channel_names", "class_names", "sample_rate_hz", "architecture"])
        assert profile.channel_names == ["ch_0", "ch_1", "ch_2", "ch_3"]
        assert profile.window_steps == 30
        assert profile.get_csv_file_path() == "x.csv"
        assert profile.required_columns[-1] == "ch_3"

    @pytest.mark.parametrize("name", ["dsads_profile", "pamap_profile", "emg_profile"])
    def test_dataset_profiles(self, name):
        """Test that each real-data profile is internally consistent."""
        profile = create_test_profile(name)
        assert_profile_configuration(profile, ["channel_names", "class_names", "sample_rate_hz", "architecture"])
        assert profile.architecture in ("mlp", "tpn", "double_stream")


@pytest.mark.integration
@pytest.mark.slow
class TestCommandLine:
    """Test the verbs end to end on a tiny synthetic benchmark."""

    def _config(self, tmp_path, output_dir, **extra):
        return write_config_file(tmp_path, fast_overrides(str(output_dir / "synthetic.csv"), **extra))

    def _run(self, verb, config, output_dir, *flags):
        return main([verb, "--config", config, "--out", str(output_dir), *flags])

    def test_generate_pretrain_adapt(self, tmp_path, output_dir):
        """Test the full chain of verbs and the files each one writes."""
        config = self._config(tmp_path, output_dir)
        assert self._run("synth-gen", config, output_dir) == 0
        assert (output_dir / "synthetic.csv").is_file()

        assert self._run("pretrain", config, output_dir) == 0
        assert (output_dir / "source_model.npz").is_file()
        summary = json.loads((output_dir / "pretrain.json").read_text(encoding="utf-8"))
        assert summary["target_subject"] == "S01"

        assert self._run("adapt", config, output_dir) == 0
        run_dir = output_dir / "activeself"
        for name in ("iteration_01.json", "adaptation_report.json", "adapted_model.npz"):
            assert (run_dir / name).is_file()
        manifest = json.loads((output_dir / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["verb"] == "adapt"
        assert manifest["seeds"]["root"] == 0
        assert len(manifest["config_hash"]) == 64

    def test_full_fine_tuning_verb(self, tmp_path, output_dir):
        """Test the supervised upper bound from the command line."""
        config = self._config(tmp_path, output_dir)
        assert self._run("synth-gen", config, output_dir) == 0
        assert self._run("pretrain", config, output_dir) == 0
        assert self._run("fullft", config, output_dir) == 0
        report = json.loads((output_dir / "fullft" / "adaptation_report.json").read_text(encoding="utf-8"))
        assert report["variant"] == "fullft"
        assert report["cumulative_queries"] == [report["n_train"]]

    def test_evaluate_and_ablate(self, tmp_path, output_dir):
        """Test the benchmark verbs on one target subject."""
        config = self._config(tmp_path, output_dir)
        assert self._run("synth-gen", config, output_dir) == 0
        assert self._run("evaluate", config, output_dir, "--target", "S01") == 0
        report = json.loads((output_dir / "report.json").read_text(encoding="utf-8"))
        assert set(report["summary"]) == {"source_only", "activeself", "sub_slss", "sub_ust", "fullft"}
        assert (output_dir / "table.csv").is_file()

        assert self._run("ablate", config, output_dir, "--target", "S01", "--seeds", "2") == 0
        sweep = json.loads((output_dir / "sweep.json").read_text(encoding="utf-8"))
        assert sweep["seeds"] == [0, 1]

    def test_exit_codes(self, tmp_path, output_dir):
        """Test configuration and lookup failures map to their exit codes."""
        assert main(["pretrain", "--config", str(tmp_path / "absent.env"), "--out", str(output_dir)]) == 3
        config = self._config(tmp_path, output_dir)
        assert self._run("synth-gen", config, output_dir) == 0
        assert self._run("pretrain", config, output_dir, "--target", "S09") == 4

    def test_outputs_and_logs_follow_configured_directory(self, tmp_path):
        """Test that output_dir from the config file places the manifest and the log files."""
        configured = tmp_path / "configured"
        config = write_config_file(tmp_path, fast_overrides(str(configured / "synthetic.csv"),
                                                            output_dir=str(configured)))
        assert main(["synth-gen", "--config", config]) == 0
        assert (configured / "manifest.json").is_file()
        assert (configured / "synthetic.csv").is_file()
        assert (configured / "logs" / "app.log").is_file()

    def test_calibrated_generation(self, tmp_path, output_dir, monkeypatch):
        """Test that --calibrate records the search and generates with the chosen shift."""
        calls = []

        def fake_calibrate(synth, spec, segment, jobs=1):
            calls.append((synth, spec))
            return ShiftCalibration(shift_magnitude=0.25, source_accuracy=71.5, band=(60.0, 80.0),
                                    trials=[{"shift_magnitude": 0.25, "source_accuracy": 71.5}])

        monkeypatch.setattr("cli.commands.calibrate_shift", fake_calibrate)
        config = self._config(tmp_path, output_dir)
        assert self._run("synth-gen", config, output_dir, "--calibrate") == 0
        assert len(calls) == 1
        assert calls[0][1].subjects is None and not calls[0][1].include_fullft
        calibration = json.loads((output_dir / "calibration.json").read_text(encoding="utf-8"))
        assert calibration["shift_magnitude"] == pytest.approx(0.25)
        assert calibration["band"] == [60.0, 80.0]
        manifest = json.loads((output_dir / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["summary"]["shift_magnitude"] == pytest.approx(0.25)
        assert manifest["summary"]["source_accuracy"] == pytest.approx(71.5)
        assert (output_dir / "synthetic.csv").is_file()
