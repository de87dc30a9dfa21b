"""
Adaptation engine: the iterative teacher/student loop over one target subject.

Each iteration predicts the target training windows with the teacher, embeds
their features in 3-D, builds the labelled pool from confident pseudo-labels,
oracle queries and propagated labels (as the variant allows), and fine-tunes
a student on it.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from config.logging_config import get_pipeline_logger
from .classifier import HarModel, fine_tune, predict
from .data.splits import LosoSplit
from .data.windowing import WindowSet
from .embedding import pca_fit, pca_transform
from .errors import InsufficientCentersError, InvariantViolation
from .evaluation.metrics import accuracy, labeled_percentage
from .pipeline.pool import LabeledPool, assemble_pool
from .pipeline.run_config import RunConfig
from .pipeline.snapshot import AdaptationReport, IterationSnapshot
from .selection import (
    AugmentedSet,
    CenterSet,
    GroundTruthOracle,
    OracleLedger,
    SelfTrainingSet,
    anchors_only,
    augment_core_set,
    build_center_set,
    build_self_training_set,
    distance_vectors,
    oracle_query,
    select_core_set,
)
from .utils.seeding import derive_seed
from .utils.timing import PhaseTimer

logger = get_pipeline_logger()


@dataclass
class IterationResult:
    student: HarModel
    pool: LabeledPool
    snapshot: IterationSnapshot
    centers: CenterSet


class AdaptationEngine:
    """
    Runs adaptation for one target subject.

    The engine owns the oracle (ground truth of the target training windows)
    and the ledger of every label it has handed out. Test windows are only
    ever used to score students.
    """

    def __init__(self, config: RunConfig, train: WindowSet, test: WindowSet,
                 ledger: Optional[OracleLedger] = None, target_subject: str = ""):
        self.config = config
        self.train = train
        self.test = test
        self.oracle = GroundTruthOracle(train.labels)
        self.ledger = ledger if ledger is not None else OracleLedger()
        self.target_subject = target_subject
        self.n_total = len(train) + len(test)

    def score(self, model: HarModel) -> float:
        if len(self.test) == 0:
            return 0.0
        return accuracy(self.test.labels, predict(model, self.test).labels)

    def _centers(self, selected: SelfTrainingSet, coords: np.ndarray,
                 previous: Optional[CenterSet], snapshot: IterationSnapshot) -> CenterSet:
        if len(selected):
            snapshot.center_source = "current"
            return build_center_set(selected, coords)
        snapshot.flags.append("empty_self_training_set")
        if previous is not None and len(previous):
            # earlier centers keep their windows; re-project into this iteration's space
            snapshot.center_source = "previous"
            snapshot.flags.append("centers_from_previous_iteration")
            return CenterSet(previous.classes.copy(), previous.indices.copy(), coords[previous.indices])
        snapshot.center_source = "none"
        return CenterSet.empty()

    def _query(self, selected: SelfTrainingSet, centers: CenterSet, coords: np.ndarray,
               snapshot: IterationSnapshot) -> None:
        candidates = np.setdiff1d(np.arange(len(self.train)), selected.indices)
        try:
            table = distance_vectors(candidates, coords, centers)
        except InsufficientCentersError:
            snapshot.flags.append("insufficient_centers")
            logger.warning(f"Iteration {snapshot.iteration}: {len(centers)} centers, querying skipped")
            return
        if len(table) == 0:
            snapshot.flags.append("no_query_candidates")
            return
        before = self.ledger.count
        core = select_core_set(table, self.config.n_per_boundary, self.oracle, self.ledger, self.config.selection)
        snapshot.new_queries = self.ledger.count - before
        snapshot.core_per_category = core.per_category()
        if core.degenerate:
            snapshot.flags.append("duplicate_centers")

    def _augment(self, selected: SelfTrainingSet, centers: CenterSet, coords: np.ndarray,
                 snapshot: IterationSnapshot) -> Optional[AugmentedSet]:
        if self.ledger.count == 0:
            return None
        anchors, labels = self.ledger.indices(), self.ledger.label_array()
        if not self.config.runs(3):
            return anchors_only(anchors, labels)
        taken = np.union1d(selected.indices, anchors)
        candidates = np.setdiff1d(np.arange(len(self.train)), taken)
        augmented = augment_core_set(
            anchors, labels, candidates, centers, coords, self.train.timestamps_ms,
            thres_t_s=self.config.thres_t_s, cutoff=self.config.fs_cutoff,
        )
        if augmented.flags:
            snapshot.flags.append("propagation_guards")
        return augmented

    def run_iteration(self, teacher: HarModel, iteration: int,
                      previous_centers: Optional[CenterSet] = None) -> IterationResult:
        """
        One pass of predict, embed, select, augment, fine-tune.

        Args:
            teacher: Source model at iteration 1, the previous student after.
            iteration: 1-based iteration index.
            previous_centers: Centers of the last iteration, used when S is empty.

        Returns:
            IterationResult; the student is the teacher itself when the pool is empty.
        """
        cfg = self.config
        timer = PhaseTimer()
        snapshot = IterationSnapshot(iteration=iteration, variant=cfg.variant, threshold=0.0)
        snapshot.teacher_digest = teacher.digest()
        logger.info(f"[{self.target_subject}] iteration {iteration} ({cfg.variant}) starting")

        if cfg.variant == "fullft":
            with timer.phase("select"):
                for index in range(len(self.train)):
                    oracle_query(self.ledger, index, self.oracle)
            selected = SelfTrainingSet(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64),
                                       np.zeros(0), iteration, 1.0)
            snapshot.threshold = 1.0
            centers = CenterSet.empty()
            augmented = anchors_only(self.ledger.indices(), self.ledger.label_array())
        else:
            with timer.phase("predict"):
                predictions = predict(teacher, self.train)
            with timer.phase("pca"):
                pca = pca_fit(predictions.features)
                coords = pca_transform(pca, predictions.features)
            snapshot.pca = pca.to_dict()
            if pca.rank_deficient:
                snapshot.flags.append("pca_rank_deficient")

            with timer.phase("select"):
                selected = build_self_training_set(
                    predictions, coords, iteration, cfg.base_threshold, exclude=self.ledger.indices()
                )
                snapshot.threshold = selected.threshold
                centers = self._centers(selected, coords, previous_centers, snapshot)
                if cfg.runs(2):
                    self._query(selected, centers, coords, snapshot)
            snapshot.selection_indices = list(range(len(self.train)))

            with timer.phase("augment"):
                augmented = self._augment(selected, centers, coords, snapshot) if cfg.runs(2) else None

        snapshot.self_training_size = len(selected)
        snapshot.self_training_per_class = selected.class_counts(teacher.n_classes)
        snapshot.centers = centers.to_dict() if len(centers) else None
        if augmented is not None:
            snapshot.augmented = augmented.summary()

        pool = assemble_pool(selected, augmented, iteration)
        if len(pool) and pool.indices.max() >= len(self.train):
            raise InvariantViolation("pool refers to a window outside the target training set")
        snapshot.pool_size = len(pool)
        snapshot.pool_composition = pool.composition()
        snapshot.pool_indices = pool.indices.tolist()

        if len(pool) == 0:
            snapshot.flags.append("empty_pool_fine_tune_skipped")
            logger.warning(f"[{self.target_subject}] iteration {iteration}: empty pool, teacher kept")
            student = teacher
        else:
            with timer.phase("fine_tune"):
                trained = fine_tune(
                    teacher, self.train, pool,
                    epochs=cfg.epochs,
                    learning_rate=cfg.learning_rate,
                    seed=derive_seed(cfg.seed, "fine_tune", iteration),
                    batch_size=cfg.batch_size,
                )
            student = trained.model
            snapshot.fine_tuned = True
            snapshot.loss_curve = trained.loss_curve
            snapshot.absent_classes = trained.absent_classes
            if trained.absent_classes:
                snapshot.flags.append("absent_classes_in_pool")
            if student.feature_digest() != teacher.feature_digest():
                raise InvariantViolation("fine-tuning changed the shared feature stack")

        snapshot.feature_digest = student.feature_digest()
        snapshot.student_digest = student.digest()
        snapshot.ledger = self.ledger.to_dict()
        snapshot.cumulative_queries = self.ledger.count
        snapshot.labeled_percentage = labeled_percentage(self.ledger, self.n_total)
        snapshot.test_accuracy = self.score(student)
        snapshot.phase_order = list(timer.order)
        snapshot.timings = timer.as_dict()
        logger.info(
            f"[{self.target_subject}] iteration {iteration}: |S|={snapshot.self_training_size}, "
            f"new queries={snapshot.new_queries}, |T'|={snapshot.pool_size}, "
            f"labeled={snapshot.labeled_percentage:.3f}%, accuracy={snapshot.test_accuracy:.2f}%"
        )
        return IterationResult(student=student, pool=pool, snapshot=snapshot, centers=centers)

    def run_adaptation(self, source_model: HarModel) -> Tuple[HarModel, AdaptationReport]:
        """Chain ``max_iterations`` iterations starting from the source model."""
        cfg = self.config
        report = AdaptationReport(
            target_subject=self.target_subject,
            variant=cfg.variant,
            config=cfg.to_dict(),
            n_train=len(self.train),
            n_test=len(self.test),
            source_accuracy=self.score(source_model),
        )
        logger.info(f"[{self.target_subject}] source-only accuracy {report.source_accuracy:.2f}%")
        teacher = source_model
        centers: Optional[CenterSet] = None
        for iteration in range(1, cfg.max_iterations + 1):
            result = self.run_iteration(teacher, iteration, centers)
            expected = report.iterations[-1].student_digest if report.iterations else source_model.digest()
            if result.snapshot.teacher_digest != expected:
                raise InvariantViolation(f"iteration {iteration} did not start from the previous student")
            report.iterations.append(result.snapshot)
            report.flags.extend(f"iteration {iteration}: {f}" for f in result.snapshot.flags)
            teacher = result.student
            if len(result.centers):
                centers = result.centers
        report.final_digest = teacher.digest()
        return teacher, report


def run_iteration(teacher: HarModel, windows: WindowSet, ledger: OracleLedger, config: RunConfig,
                  iteration: int, test: Optional[WindowSet] = None,
                  previous_centers: Optional[CenterSet] = None) -> IterationResult:
    """Single iteration over ``windows`` with an externally held ledger."""
    empty = test if test is not None else windows.subset([])
    engine = AdaptationEngine(config, windows, empty, ledger=ledger)
    return engine.run_iteration(teacher, iteration, previous_centers)


def run_adaptation(source_model: HarModel, split: LosoSplit, config: RunConfig) -> Tuple[HarModel, AdaptationReport]:
    """Adapt ``source_model`` to the target subject of ``split``."""
    engine = AdaptationEngine(config, split.target_train, split.target_test, target_subject=split.target_subject)
    return engine.run_adaptation(source_model)
