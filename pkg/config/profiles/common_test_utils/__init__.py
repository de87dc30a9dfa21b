"""Common test utilities for profile testing.

This module provides shared utilities, fixtures, and helpers for testing
across different profiles in the config/profiles/ directory.

Key Components:
- fixtures: Pytest fixtures for common test setup
- data_generators: Recordings, window sets, embeddings and prediction batches
- assertions: Custom assertion helpers
- config_helpers: Configuration and profile utilities
"""

from .fixtures import *
from .data_generators import *
from .assertions import *
from .config_helpers import *

__all__ = [
    # Fixtures
    'temp_csv_path',
    'tiny_synth_config',
    'tiny_windows',
    'tiny_split',
    'tiny_architecture',
    'source_model',
    'synthetic_csv',
    'synthetic_environment',
    'output_dir',

    # Data Generators
    'make_recording',
    'make_window_set',
    'make_synthetic_windows',
    'write_synthetic_csv',
    'create_sensor_csv',
    'clustered_coords',
    'prediction_batch',
    'kink_margin',
    'smooth_batch',

    # Assertions
    'assert_probabilities',
    'assert_disjoint',
    'assert_feature_stack_unchanged',
    'assert_snapshot_structure',
    'assert_dataframe_structure',
    'assert_profile_configuration',

    # Config Helpers
    'TINY_SYNTH',
    'TINY_HIDDEN',
    'tiny_synth',
    'fast_overrides',
    'write_config_file',
    'create_test_profile',
    'setup_test_environment',
]
