"""Tests for the embedding, self-training, active querying, propagation and pool steps."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from active_self.embedding import pca_fit, pca_transform
from active_self.errors import (
    ConfigError,
    DataError,
    DimensionError,
    InsufficientCentersError,
    InvariantViolation,
    OracleError,
)
from active_self.evaluation import labeled_percentage, query_budget
from active_self.pipeline import assemble_pool
from active_self.selection import (
    CenterSet,
    GroundTruthOracle,
    OracleLedger,
    SelfTrainingSet,
    anchors_only,
    augment_core_set,
    boundary_categories,
    build_center_set,
    build_self_training_set,
    distance_vectors,
    informativeness,
    informativeness_scores,
    oracle_query,
    select_core_set,
    similarity,
    threshold_for_iter,
)

# Import common test utilities
from config.profiles.common_test_utils import (
    # Data generators
    clustered_coords, prediction_batch,

    # Assertions
    assert_disjoint,
)


def _centers(classes, coords):
    classes = np.asarray(classes, dtype=np.int64)
    return CenterSet(classes, np.arange(len(classes), dtype=np.int64), np.asarray(coords, dtype=np.float64))


def _selected(indices, labels, iteration=1):
    indices = np.asarray(indices, dtype=np.int64)
    return SelfTrainingSet(indices, np.asarray(labels, dtype=np.int64), np.ones(len(indices)), iteration, 0.3)


def _all_centers(coords, labels):
    return build_center_set(_selected(np.arange(len(labels)), labels), coords)


@pytest.mark.unit
class TestPca:
    """Test the three-component embedding."""

    def _features(self, n=500, seed=0):
        rng = np.random.default_rng(seed)
        return rng.normal(size=(n, 5)) * np.array([5.0, 3.0, 2.0, 1.0, 0.5]) + 7.0

    def test_components_orthonormal_and_ordered(self):
        """Test orthonormal rows and descending explained variance."""
        model = pca_fit(self._features())
        np.testing.assert_allclose(model.components @ model.components.T, np.eye(3), atol=1e-10)
        assert np.all(np.diff(model.explained_variance) <= 0)
        assert 0.0 < model.explained_variance.sum() <= 1.0 + 1e-12
        assert not model.rank_deficient

    def test_sign_convention(self):
        """Test that each component's largest-magnitude coordinate is positive."""
        model = pca_fit(self._features(seed=3))
        for row in model.components:
            assert row[np.argmax(np.abs(row))] > 0

    def test_matches_svd(self):
        """Test agreement with the leading right singular vectors up to sign."""
        x = self._features(seed=1)
        model = pca_fit(x)
        _, _, vt = np.linalg.svd(x - x.mean(axis=0), full_matrices=False)
        for fitted, reference in zip(model.components, vt[:3]):
            assert abs(float(fitted @ reference)) == pytest.approx(1.0, abs=1e-6)

    def test_transform(self):
        """Test that the mean maps to the origin and widths are checked."""
        x = self._features()
        model = pca_fit(x)
        np.testing.assert_allclose(pca_transform(model, model.mean), np.zeros(3), atol=1e-12)
        assert pca_transform(model, x).shape == (500, 3)
        with pytest.raises(DimensionError):
            pca_transform(model, np.zeros((2, 4)))

    def test_rank_deficient_input(self):
        """Test that rank-1 features are completed to an orthonormal basis and flagged."""
        direction = np.array([1.0, 2.0, 0.5, -1.0, 3.0])
        x = np.arange(10, dtype=np.float64)[:, None] * direction
        model = pca_fit(x)
        assert model.rank_deficient
        np.testing.assert_allclose(model.components @ model.components.T, np.eye(3), atol=1e-8)
        np.testing.assert_allclose(model.explained_variance, [1.0, 0.0, 0.0], atol=1e-10)

    def test_full_rank_three_features_preserve_distances(self):
        """Test that three components of 3-D data are a rotation: pairwise distances survive."""
        rng = np.random.default_rng(5)
        x = rng.normal(size=(120, 3)) * np.array([3.0, 2.0, 1.0])
        y = pca_transform(pca_fit(x), x)
        before = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=2)
        after = np.linalg.norm(y[:, None, :] - y[None, :, :], axis=2)
        np.testing.assert_allclose(after, before, atol=1e-9)

    def test_noisy_line_explained_by_first_component(self):
        """Test that a line with tiny jitter puts at least 99.99% of variance on one component."""
        rng = np.random.default_rng(6)
        direction = np.array([1.0, 2.0, 0.5, -1.0, 3.0])
        x = np.linspace(-5.0, 5.0, 200)[:, None] * direction + 1e-3 * rng.normal(size=(200, 5))
        model = pca_fit(x)
        assert model.explained_variance[0] >= 0.9999
        assert abs(float(model.components[0] @ direction)) / np.linalg.norm(direction) == pytest.approx(1.0, abs=1e-6)

    def test_input_checks(self):
        """Test too few samples, too few features and a non-matrix input."""
        with pytest.raises(DataError):
            pca_fit(np.zeros((3, 5)))
        with pytest.raises(DataError):
            pca_fit(np.zeros((10, 2)))
        with pytest.raises(DimensionError):
            pca_fit(np.zeros(10))


@pytest.mark.unit
class TestSelfTraining:
    """Test confidence thresholds, the self-training set and class centers."""

    @pytest.mark.parametrize("iteration, expected", [(1, 0.3), (2, 0.35), (3, 0.4), (20, 0.95)])
    def test_threshold_schedule(self, iteration, expected):
        """Test the linear schedule and its cap."""
        assert threshold_for_iter(0.3, iteration) == pytest.approx(expected)

    def test_threshold_rejects_bad_input(self):
        """Test that iterations are 1-based and the base lies in [0, 1)."""
        with pytest.raises(ConfigError):
            threshold_for_iter(0.3, 0)
        with pytest.raises(ConfigError):
            threshold_for_iter(1.0, 1)

    def test_admission_is_strict(self):
        """Test that confidence equal to the threshold is not admitted."""
        batch = prediction_batch([0, 1, 2, 3], [0.25, 0.3, 0.31, 0.9], n_classes=5)
        coords = np.zeros((4, 3))
        first = build_self_training_set(batch, coords, iteration=1, base_threshold=0.3)
        assert first.indices.tolist() == [2, 3]
        assert first.pseudo_labels.tolist() == [2, 3]
        assert first.class_counts(5) == [0, 0, 1, 1, 0]
        second = build_self_training_set(batch, coords, iteration=2, base_threshold=0.3)
        assert second.indices.tolist() == [3]

    def test_exclude(self):
        """Test that oracle-labelled windows are never self-labelled."""
        batch = prediction_batch([0, 1, 2, 3], [0.25, 0.3, 0.31, 0.9], n_classes=5)
        selected = build_self_training_set(batch, np.zeros((4, 3)), 1, 0.3, exclude=[3])
        assert selected.indices.tolist() == [2]

    def test_length_mismatch(self):
        """Test that predictions and coordinates must align."""
        batch = prediction_batch([0, 1], [0.9, 0.9], n_classes=2)
        with pytest.raises(DimensionError):
            build_self_training_set(batch, np.zeros((3, 3)), 1, 0.3)

    def test_center_is_member_nearest_centroid(self):
        """Test center choice, including the lower-index tie-break."""
        coords = np.array([[-1, 0, 0], [1, 0, 0], [5, 0, 0], [6, 0, 0], [8, 0, 0]], dtype=np.float64)
        centers = build_center_set(_selected(range(5), [0, 0, 1, 1, 1]), coords)
        assert centers.classes.tolist() == [0, 1]
        assert centers.indices.tolist() == [0, 3]
        np.testing.assert_array_equal(centers.coord_of(1), [6, 0, 0])
        assert not centers.has(2)

    def test_centers_need_members(self):
        """Test that an empty self-training set has no centers."""
        with pytest.raises(DataError):
            build_center_set(_selected([], []), np.zeros((4, 3)))


@pytest.mark.unit
class TestActiveSelection:
    """Test distance vectors, informativeness and boundary-stratified querying."""

    def test_informativeness_values(self):
        """Test f_I on a line between two centers."""
        centers = _centers([0, 1], [[0, 0, 0], [4, 0, 0]])
        coords = np.array([[1, 0, 0], [2, 0, 0], [0, 0, 0], [4 / 3, 0, 0]], dtype=np.float64)
        table = distance_vectors(range(4), coords, centers)
        scores, degenerate = informativeness_scores(table.d_n, table.d_sn)
        np.testing.assert_allclose(scores, [2 / 3, 0.0, 1.0, 0.5], atol=1e-12)
        assert not degenerate.any()
        assert informativeness(table[0]) == pytest.approx(2 / 3)
        # equidistant: nearest is the lower class id
        assert table[1].nearest == 0 and table[1].second == 1

    def test_duplicate_centers_are_degenerate(self):
        """Test that d_sn = 0 scores zero and is flagged."""
        centers = _centers([0, 1], [[1, 1, 1], [1, 1, 1]])
        table = distance_vectors([0], np.ones((1, 3)), centers)
        scores, degenerate = informativeness_scores(table.d_n, table.d_sn)
        assert scores.tolist() == [0.0]
        assert degenerate.tolist() == [True]
        assert informativeness(table[0]) == 0.0

    def test_needs_two_centers(self):
        """Test that a single center cannot define a boundary."""
        with pytest.raises(InsufficientCentersError):
            distance_vectors([0], np.zeros((1, 3)), _centers([0], [[0, 0, 0]]))

    def test_boundary_categories(self):
        """Test grouping by unordered nearest pair."""
        centers = _centers([0, 1, 2], [[0, 0, 0], [4, 0, 0], [0, 4, 0]])
        coords = np.array([[1, 0, 0], [3, 0, 0], [0, 3, 0], [3, 3, 0]], dtype=np.float64)
        categories = boundary_categories(distance_vectors(range(4), coords, centers))
        assert [c.pair for c in categories] == [(0, 1), (0, 2), (1, 2)]
        assert [c.members.tolist() for c in categories] == [[0, 1], [2], [3]]

    def test_queries_lowest_scores_per_boundary(self):
        """Test that a two-class problem queries exactly the per-boundary budget."""
        coords, labels = clustered_coords(20, 2, seed=4)
        table = distance_vectors(range(40), coords, _all_centers(coords, labels))
        oracle, ledger = GroundTruthOracle(labels), OracleLedger()
        core = select_core_set(table, 5, oracle, ledger)
        assert len(core) == 5
        assert oracle.calls == 5 and ledger.count == 5
        assert core.per_category() == {"0-1": 5}
        np.testing.assert_array_equal(core.labels, labels[core.indices])
        scores, _ = informativeness_scores(table.d_n, table.d_sn)
        others = np.setdiff1d(np.arange(40), core.indices)
        assert core.scores.max() <= scores[others].min()

    def test_highest_selection(self):
        """Test the reversed ordering."""
        coords, labels = clustered_coords(20, 2, seed=4)
        table = distance_vectors(range(40), coords, _all_centers(coords, labels))
        core = select_core_set(table, 5, GroundTruthOracle(labels), OracleLedger(), selection="highest")
        scores, _ = informativeness_scores(table.d_n, table.d_sn)
        others = np.setdiff1d(np.arange(40), core.indices)
        assert core.scores.min() >= scores[others].max()

    def test_ledger_entries_not_requeried(self):
        """Test that a second round picks fresh windows."""
        coords, labels = clustered_coords(20, 2, seed=4)
        table = distance_vectors(range(40), coords, _all_centers(coords, labels))
        oracle, ledger = GroundTruthOracle(labels), OracleLedger()
        first = select_core_set(table, 5, oracle, ledger)
        second = select_core_set(table, 5, oracle, ledger)
        assert_disjoint(first.indices, second.indices)
        assert oracle.calls == 10 and ledger.count == 10

    def test_queries_within_budget(self):
        """Test that queries never exceed N·K(K−1)/2."""
        coords, labels = clustered_coords(15, 4, seed=2, spread=1.5)
        table = distance_vectors(range(60), coords, _all_centers(coords, labels))
        core = select_core_set(table, 3, GroundTruthOracle(labels), OracleLedger())
        assert 0 < len(core) <= query_budget(3, 4)
        assert all(count <= 3 for count in core.per_category().values())

    @pytest.mark.parametrize("n_per_boundary", [1, 3, 5])
    def test_full_categories_spend_exact_budget(self, n_per_boundary):
        """Test that N·K(K−1)/2 windows are queried when every boundary has at least N candidates."""
        vertices = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=np.float64)
        centers = _centers(range(4), vertices)
        rng = np.random.default_rng(3)
        coords, labels = [], []
        for a in range(4):
            for b in range(a + 1, 4):
                # near the edge midpoint, a and b stay the two nearest centers
                along = rng.uniform(0.3, 0.7, size=(5, 1))
                coords.append(vertices[a] + along * (vertices[b] - vertices[a]) + rng.uniform(-0.1, 0.1, size=(5, 3)))
                labels.extend([a] * 5)
        coords = np.concatenate(coords)
        table = distance_vectors(range(len(coords)), coords, centers)
        assert {c.pair: len(c.members) for c in boundary_categories(table)} == {
            (a, b): 5 for a in range(4) for b in range(a + 1, 4)
        }

        oracle, ledger = GroundTruthOracle(np.asarray(labels)), OracleLedger()
        core = select_core_set(table, n_per_boundary, oracle, ledger)
        assert len(core) == query_budget(n_per_boundary, 4) == n_per_boundary * 6
        assert oracle.calls == ledger.count == len(core)
        assert set(core.per_category().values()) == {n_per_boundary}

    @pytest.mark.slow
    def test_three_rounds_label_under_one_percent_of_large_target(self):
        """Test that N=10 over three rounds labels less than 1% of 100,000 windows."""
        coords, labels = clustered_coords(16_700, 6, seed=8, spread=1.5)
        assert len(labels) >= 100_000
        table = distance_vectors(range(len(labels)), coords, _all_centers(coords, labels))
        oracle, ledger = GroundTruthOracle(labels), OracleLedger()
        for _ in range(3):
            core = select_core_set(table, 10, oracle, ledger)
            assert len(core) <= query_budget(10, 6)
        assert 0 < ledger.count <= 3 * query_budget(10, 6)
        assert labeled_percentage(ledger, len(labels)) < 1.0

    def test_ties_go_to_lower_index(self):
        """Test that equal scores are broken by window index."""
        centers = _centers([0, 1], [[0, 0, 0], [4, 0, 0]])
        coords = np.tile([1.0, 0.0, 0.0], (6, 1))
        table = distance_vectors([5, 3, 1, 4, 0, 2], coords, centers)
        core = select_core_set(table, 2, GroundTruthOracle(np.zeros(6)), OracleLedger())
        assert core.indices.tolist() == [0, 1]

    def test_oracle_failure_leaves_ledger_unchanged(self):
        """Test that queries are committed only when every answer arrived."""
        centers = _centers([0, 1], [[0, 0, 0], [4, 0, 0]])
        coords = np.array([[1, 0, 0], [2, 0, 0], [3, 0, 0]], dtype=np.float64)
        table = distance_vectors(range(3), coords, centers)

        def oracle(index):
            if index == 2:
                raise OracleError("unreachable annotator")
            return 0

        ledger = OracleLedger({0: 0})
        with pytest.raises(OracleError):
            select_core_set(table, 10, oracle, ledger)
        assert ledger.labels == {0: 0}

    def test_select_rejects_bad_arguments(self):
        """Test budget, selection order and empty candidates."""
        centers = _centers([0, 1], [[0, 0, 0], [4, 0, 0]])
        table = distance_vectors([0], np.ones((1, 3)), centers)
        oracle = GroundTruthOracle(np.zeros(1))
        with pytest.raises(ConfigError):
            select_core_set(table, 0, oracle, OracleLedger())
        with pytest.raises(ConfigError):
            select_core_set(table, 1, oracle, OracleLedger(), selection="middle")
        with pytest.raises(DataError):
            select_core_set(distance_vectors([], np.ones((1, 3)), centers), 1, oracle, OracleLedger())


@pytest.mark.unit
class TestOracle:
    """Test the ground-truth oracle and the ledger."""

    def test_ledger_labels_are_immutable(self):
        """Test that a conflicting label is refused and a repeat is accepted."""
        ledger = OracleLedger()
        ledger.record(3, 1)
        ledger.record(3, 1)
        with pytest.raises(OracleError):
            ledger.record(3, 2)
        assert ledger.count == 1

    def test_query_uses_ledger(self):
        """Test that a known window is answered without asking again."""
        oracle, ledger = GroundTruthOracle(np.array([2, 0, 1])), OracleLedger()
        assert oracle_query(ledger, 0, oracle) == 2
        assert oracle_query(ledger, 0, oracle) == 2
        assert oracle.calls == 1
        assert OracleLedger.from_dict(ledger.to_dict()).labels == {0: 2}

    def test_out_of_range(self):
        """Test that only target-train indices can be asked."""
        with pytest.raises(OracleError):
            GroundTruthOracle(np.zeros(3))(3)


# tenths keep distances away from underflow
_coord = st.lists(st.integers(min_value=-1000, max_value=1000).map(lambda v: v / 10.0), min_size=3, max_size=3)


@pytest.mark.unit
@pytest.mark.edge_case
class TestScoreProperties:
    """Test both scores against a plain re-computation on random inputs."""

    @settings(max_examples=1000, deadline=None)
    @given(point=_coord, centers=st.lists(_coord, min_size=2, max_size=5))
    def test_informativeness_matches_recomputation(self, point, centers):
        """Test (d_sn − d_n) / d_sn from sorted Euclidean distances."""
        table = distance_vectors([0], np.array([point]), _centers(range(len(centers)), centers))
        d = sorted(math.dist(point, c) for c in centers)
        expected = 0.0 if d[1] == 0 else (d[1] - d[0]) / d[1]
        score = informativeness(table[0])
        assert abs(score - expected) <= 1e-9
        assert 0.0 <= score <= 1.0

    @settings(max_examples=1000, deadline=None)
    @given(
        coord_q=_coord,
        coord_j=_coord,
        center=_coord,
        ts_q=st.integers(min_value=0, max_value=10_000_000),
        ts_j=st.integers(min_value=0, max_value=10_000_000),
        thres_t_s=st.floats(min_value=0.1, max_value=60.0),
    )
    def test_similarity_matches_recomputation(self, coord_q, coord_j, center, ts_q, ts_j, thres_t_s):
        """Test d(x_j, c) / d(x_q, c) plus the gap in seconds over thres_t."""
        value = similarity(np.array(coord_q), np.array(coord_j), np.array(center), ts_q, ts_j, thres_t_s)
        d_q = math.dist(coord_q, center)
        if d_q == 0:
            assert value == float("inf")
            return
        expected = math.dist(coord_j, center) / d_q + abs(ts_q - ts_j) / 1000.0 / thres_t_s
        assert value == pytest.approx(expected, rel=1e-9, abs=1e-9)


@pytest.mark.unit
class TestAgainstBruteForce:
    """Test centers, distance tables and selection against plain loops."""

    @pytest.mark.parametrize("seed", range(4))
    def test_centers_match_nearest_to_centroid_loop(self, seed):
        """Test each center against an explicit scan of its 50 members."""
        coords, labels = clustered_coords(50, 4, seed=seed, spread=1.0)
        centers = _all_centers(coords, labels)
        for k in range(4):
            members = [i for i in range(len(labels)) if labels[i] == k]
            centroid = [sum(coords[i][d] for i in members) / len(members) for d in range(3)]
            best = min(members, key=lambda i: (math.dist(coords[i], centroid), i))
            assert int(centers.indices[k]) == best
            assert centers.coord_of(k).tolist() == coords[best].tolist()

    @pytest.mark.parametrize("seed", range(4))
    def test_distance_vectors_match_full_sort(self, seed):
        """Test nearest, second nearest and both distances against sorting every row."""
        rng = np.random.default_rng(seed)
        classes = [1, 3, 4, 7, 9]
        center_coords = rng.normal(scale=3.0, size=(5, 3))
        coords = rng.normal(scale=3.0, size=(40, 3))
        table = distance_vectors(range(40), coords, _centers(classes, center_coords))
        for row in range(40):
            ranked = sorted((math.dist(coords[row], c), k) for c, k in zip(center_coords, classes))
            assert int(table.nearest[row]) == ranked[0][1]
            assert int(table.second[row]) == ranked[1][1]
            assert table.d_n[row] == pytest.approx(ranked[0][0], abs=1e-12)
            assert table.d_sn[row] == pytest.approx(ranked[1][0], abs=1e-12)
            np.testing.assert_allclose(table.distances[row], [math.dist(coords[row], c) for c in center_coords],
                                       atol=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(confidences=st.lists(st.floats(min_value=0.25, max_value=1.0), min_size=1, max_size=40),
           bases=st.lists(st.floats(min_value=0.0, max_value=0.94), min_size=2, max_size=6))
    def test_self_training_set_grows_as_threshold_drops(self, confidences, bases):
        """Test that a lower threshold admits a superset of windows."""
        batch = prediction_batch([0] * len(confidences), confidences, n_classes=4)
        coords = np.zeros((len(confidences), 3))
        previous = set()
        for base in sorted(bases, reverse=True):
            members = set(build_self_training_set(batch, coords, 1, base).indices.tolist())
            assert previous <= members
            threshold = threshold_for_iter(base, 1)
            assert members == {i for i, c in enumerate(confidences) if c > threshold}
            previous = members

    def test_selection_equivariant_under_class_permutation(self):
        """Test that renaming classes renames categories and labels but queries the same windows."""
        coords, labels = clustered_coords(25, 4, seed=6, spread=1.2)
        perm = np.array([2, 0, 3, 1])
        n = len(labels)

        plain = select_core_set(distance_vectors(range(n), coords, _all_centers(coords, labels)),
                                3, GroundTruthOracle(labels), OracleLedger())
        renamed = select_core_set(distance_vectors(range(n), coords, _all_centers(coords, perm[labels])),
                                  3, GroundTruthOracle(perm[labels]), OracleLedger())

        assert sorted(renamed.indices.tolist()) == sorted(plain.indices.tolist())
        plain_labels = dict(zip(plain.indices.tolist(), plain.labels.tolist()))
        for index, label in zip(renamed.indices.tolist(), renamed.labels.tolist()):
            assert label == perm[plain_labels[index]]
        expected = {}
        for key, count in plain.per_category().items():
            a, b = (int(perm[int(k)]) for k in key.split("-"))
            expected[f"{min(a, b)}-{max(a, b)}"] = count
        assert renamed.per_category() == expected


@pytest.mark.unit
class TestAugmentation:
    """Test spatio-temporal similarity and label propagation."""

    @pytest.mark.parametrize("coord_q, coord_j, ts_j, expected", [
        ([1, 0, 0], [1, 0, 0], 0.0, 1.0),
        ([2, 0, 0], [1, 0, 0], 2500.0, 1.0),
        ([1, 0, 0], [2, 0, 0], 0.0, 2.0),
    ])
    def test_similarity(self, coord_q, coord_j, ts_j, expected):
        """Test the distance ratio plus the scaled time gap."""
        assert similarity(np.array(coord_q), np.array(coord_j), np.zeros(3), 0.0, ts_j, 5.0) == pytest.approx(expected)

    def test_similarity_edge_cases(self):
        """Test an anchor on its center and a non-positive time scale."""
        assert similarity(np.zeros(3), np.ones(3), np.zeros(3), 0.0, 0.0) == float("inf")
        with pytest.raises(ConfigError):
            similarity(np.ones(3), np.ones(3), np.zeros(3), 0.0, 0.0, thres_t_s=0.0)

    def test_propagation(self):
        """Test which candidates inherit the anchor label."""
        centers = _centers([0, 1], [[0, 0, 0], [10, 0, 0]])
        coords = np.array([[1, 0, 0], [0.5, 0, 0], [3, 0, 0], [0.5, 0, 0]], dtype=np.float64)
        timestamps = np.array([0.0, 0.0, 0.0, 3000.0])
        out = augment_core_set([0], [0], [1, 2, 3], centers, coords, timestamps, thres_t_s=5.0)
        assert out.indices.tolist() == [0, 1]
        assert out.labels.tolist() == [0, 0]
        assert out.provenance == ["queried", "propagated"]
        assert out.sources.tolist() == [-1, 0]
        assert np.isnan(out.f_s[0]) and out.f_s[1] == pytest.approx(0.5)
        assert out.n_propagated == 1
        assert out.propagation_counts() == {"0": 1}

    def test_tie_goes_to_lowest_anchor(self):
        """Test equal f_S from two anchors, with the inclusive cutoff."""
        centers = _centers([0, 1], [[0, 0, 0], [3, 0, 0]])
        coords = np.zeros((7, 3))
        coords[4] = [-1, 0, 0]
        coords[6] = [5, 0, 0]
        coords[5] = [1, 0, 0]
        out = augment_core_set([6, 4], [1, 0], [5], centers, coords, np.zeros(7), cutoff=1.0)
        assert out.indices.tolist() == [4, 6, 5]
        assert out.labels.tolist() == [0, 1, 0]
        assert out.sources.tolist() == [-1, -1, 4]

    def test_matches_brute_force(self):
        """Test the vectorised search against a direct loop over anchors."""
        coords, labels = clustered_coords(10, 3, seed=5, spread=1.0)
        centers = _all_centers(coords, labels)
        timestamps = np.arange(30, dtype=np.float64) * 30.0
        anchors = [2, 11, 20, 25]
        candidates = [i for i in range(30) if i not in anchors]
        out = augment_core_set(anchors, labels[anchors], candidates, centers, coords, timestamps)

        expected = {}
        for j in candidates:
            best, label = np.inf, None
            for a in anchors:
                f = similarity(coords[a], coords[j], centers.coord_of(int(labels[a])),
                               timestamps[a], timestamps[j])
                if f < best:
                    best, label = f, int(labels[a])
            if best <= 1.0:
                expected[j] = label
        propagated = {int(i): int(l) for i, l, p in zip(out.indices, out.labels, out.provenance) if p == "propagated"}
        assert propagated == expected

    def test_guards(self):
        """Test flags for a class without a center and an anchor on its center."""
        centers = _centers([0, 1], [[0, 0, 0], [10, 0, 0]])
        coords = np.array([[0, 0, 0], [9, 0, 0], [-5, 0, 0], [20, 0, 0]], dtype=np.float64)
        out = augment_core_set([0, 3], [0, 2], [1, 2], centers, coords, np.zeros(4))
        assert any("lies on its center" in f for f in out.flags)
        assert any("class 2 has no center" in f for f in out.flags)
        # anchor 3 falls back to the center of class 1: d_q 10, window 1 scores 0.1
        assert dict(zip(out.indices.tolist(), out.labels.tolist())) == {0: 0, 3: 2, 1: 2}

    def test_no_centers(self):
        """Test that propagation is skipped without centers."""
        out = augment_core_set([1], [0], [0, 2], CenterSet.empty(), np.zeros((3, 3)), np.zeros(3))
        assert out.indices.tolist() == [1]
        assert "no centers available, propagation skipped" in out.flags

    def test_anchors_only(self):
        """Test the queried-only set used without propagation."""
        out = anchors_only([5, 2], [1, 0])
        assert out.indices.tolist() == [2, 5]
        assert out.labels.tolist() == [0, 1]
        assert out.n_propagated == 0


@pytest.mark.unit
class TestPool:
    """Test the union of self-labelled and oracle-derived windows."""

    def test_assemble(self):
        """Test sizes, ordering and provenance counts."""
        selected = _selected(range(100), np.zeros(100))
        augmented = anchors_only(range(139, 99, -1), np.ones(40))
        pool = assemble_pool(selected, augmented)
        assert len(pool) == 140
        assert pool.indices.tolist() == list(range(140))
        assert pool.composition() == {"pseudo": 100, "queried": 40}
        assert pool.as_dict()[120] == 1

    def test_overlap_rejected(self):
        """Test that a window cannot be both pseudo- and oracle-labelled."""
        with pytest.raises(InvariantViolation):
            assemble_pool(_selected([1, 2], [0, 0]), anchors_only([2], [1]))
