"""Trajectory data augmentation: candidate selection, point modification,
class balancing and a seeded evaluation harness."""

from trajaug.balancing import BalancePlan, balance_dataset, plan_balance
from trajaug.core import (
    GeoPoint,
    RandomnessSpec,
    Trajectory,
    TrajectoryDataset,
    TrajectoryPoint,
    derive_stream,
    validate_dataset,
)
from trajaug.evaluation import (
    ExperimentConfig,
    ExperimentResultRow,
    KNNClassifier,
    accuracy,
    f1_weighted,
    fit_predict,
    pi_seeds,
    run_experiment,
    train_test_split,
)
from trajaug.geodesy import destination_point, haversine_distance, initial_bearing
from trajaug.io import load_csv, write_csv
from trajaug.kinematics import (
    FEATURE_COLUMNS,
    SegmentFeatureRow,
    dataset_features,
    point_kinematics,
    segment_features,
)
from trajaug.modification import (
    Drop,
    InCircle,
    OnCircle,
    Stretch,
    StretchMode,
    augment_dataset,
    circle_radius,
    modify_drop,
    modify_in_circle,
    modify_on_circle,
    modify_stretch,
)
from trajaug.selection import (
    CandidateSet,
    FewestSelection,
    ProportionalSelection,
    RandomSelection,
    RepresentativeSelection,
    select_fewest,
    select_proportional,
    select_random,
    select_representative,
)

__version__ = "0.1.0"
