"""Per-point kinematic series and per-trajectory statistical feature rows."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from trajaug.core import Trajectory, TrajectoryDataset, parallel_map
from trajaug.geodesy import haversine

FAMILIES = ("Distance", "Displacement", "Speed", "Acceleration", "Jerk")
STATISTICS = ("10%", "25%", "50%", "75%", "90%", "min", "max", "mean", "std")
PERCENTILES = (10.0, 25.0, 50.0, 75.0, 90.0)

# family-major: 10%_Distance ... std_Distance, 10%_Displacement ..., std_Jerk
FEATURE_COLUMNS = tuple(f"{stat}_{fam}" for fam in FAMILIES for stat in STATISTICS)

# leading entries of each family that are seeded with 0 rather than computed
_SEED_ENTRIES = np.array([1, 1, 1, 2, 3])


@dataclass(frozen=True)
class KinematicSeries:
    distance: np.ndarray
    displacement: np.ndarray
    speed: np.ndarray
    acceleration: np.ndarray
    jerk: np.ndarray

    def stacked(self) -> np.ndarray:
        return np.vstack([self.distance, self.displacement, self.speed, self.acceleration, self.jerk])


@dataclass(frozen=True)
class SegmentFeatureRow:
    traj_id: str
    label: str | None
    values: dict[str, float]

    def vector(self) -> np.ndarray:
        return np.array([self.values[c] for c in FEATURE_COLUMNS])


def point_kinematics(traj: Trajectory) -> KinematicSeries:
    """Distance, displacement, speed, acceleration and jerk per point.

    Each derivative is a backward difference over the preceding interval.
    Entries with no defined value (the first of distance and speed, the first
    two of acceleration, the first three of jerk) are 0.
    """
    n = len(traj)
    dt = np.diff(traj.seconds())
    distance = np.zeros(n)
    distance[1:] = haversine(traj.lat[:-1], traj.lon[:-1], traj.lat[1:], traj.lon[1:])
    displacement = haversine(traj.lat[0], traj.lon[0], traj.lat, traj.lon)
    speed = np.zeros(n)
    speed[1:] = distance[1:] / dt
    acceleration = np.zeros(n)
    acceleration[2:] = np.diff(speed[1:]) / dt[1:]
    jerk = np.zeros(n)
    jerk[3:] = np.diff(acceleration[2:]) / dt[2:]
    return KinematicSeries(distance, displacement, speed, acceleration, jerk)


def _statistics(series: np.ndarray) -> np.ndarray:
    """(5, n) kinematic series -> (5, 9) statistics in STATISTICS order."""
    n = series.shape[1]
    ordered = np.sort(series, axis=1)
    # linear interpolation at rank q * (n - 1), as np.percentile's default
    rank = np.asarray(PERCENTILES) / 100.0 * (n - 1)
    lo = np.floor(rank).astype(int)
    hi = np.minimum(lo + 1, n - 1)
    pct = ordered[:, lo] + (ordered[:, hi] - ordered[:, lo]) * (rank - lo)
    std = np.zeros(len(series))
    enough = (n - _SEED_ENTRIES) >= 2
    if enough.any():
        std[enough] = series[enough].std(axis=1, ddof=1)
    return np.column_stack([pct, ordered[:, 0], ordered[:, -1], series.mean(axis=1), std])


def feature_vector(traj: Trajectory) -> np.ndarray:
    """The 45 feature values in FEATURE_COLUMNS order."""
    return _statistics(point_kinematics(traj).stacked()).ravel()


def segment_features(traj: Trajectory) -> SegmentFeatureRow:
    values = feature_vector(traj)
    return SegmentFeatureRow(traj.id, traj.label, dict(zip(FEATURE_COLUMNS, values.tolist())))


def dataset_features(ds: TrajectoryDataset, workers: int = 1) -> list[SegmentFeatureRow]:
    """One row per trajectory, in canonical id order."""
    return parallel_map(segment_features, list(ds), workers)


def feature_matrix(rows: Sequence[SegmentFeatureRow]) -> np.ndarray:
    if not rows:
        return np.empty((0, len(FEATURE_COLUMNS)))
    return np.vstack([r.vector() for r in rows])


def write_features_csv(
    rows: Iterable[SegmentFeatureRow], out: IO[str], label_column: str | None = None
) -> None:
    """Header ``traj_id[,<label_column>],10%_Distance,...,std_Jerk``."""
    writer = csv.writer(out, lineterminator="\n")
    header = ["traj_id"] + ([label_column] if label_column else []) + list(FEATURE_COLUMNS)
    writer.writerow(header)
    for row in rows:
        lead = [row.traj_id] + ([row.label or ""] if label_column else [])
        writer.writerow(lead + [repr(row.values[c]) for c in FEATURE_COLUMNS])
