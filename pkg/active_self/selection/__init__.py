"""Pool-building steps: self-training, active querying, label propagation."""

from .selftrain import (
    THRESHOLD_CAP,
    CenterSet,
    SelfTrainingSet,
    build_center_set,
    build_self_training_set,
    threshold_for_iter,
)
from .active import (
    SELECTION_ORDERS,
    BoundaryCategory,
    CoreSet,
    DistanceTable,
    DistanceVector,
    GroundTruthOracle,
    OracleLedger,
    boundary_categories,
    distance_vectors,
    informativeness,
    informativeness_scores,
    oracle_query,
    select_core_set,
)
from .augment import PROPAGATED, QUERIED, AugmentedSet, anchors_only, augment_core_set, similarity

__all__ = [
    'THRESHOLD_CAP',
    'CenterSet',
    'SelfTrainingSet',
    'build_center_set',
    'build_self_training_set',
    'threshold_for_iter',
    'SELECTION_ORDERS',
    'BoundaryCategory',
    'CoreSet',
    'DistanceTable',
    'DistanceVector',
    'GroundTruthOracle',
    'OracleLedger',
    'boundary_categories',
    'distance_vectors',
    'informativeness',
    'informativeness_scores',
    'oracle_query',
    'select_core_set',
    'PROPAGATED',
    'QUERIED',
    'AugmentedSet',
    'anchors_only',
    'augment_core_set',
    'similarity',
]
