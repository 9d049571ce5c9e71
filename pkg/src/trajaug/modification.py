"""Point-modification strategies that turn one trajectory into a synthetic one.

All strategies keep timestamps, extras and label of surviving points; the
caller assigns the synthetic id.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import partial
from typing import Iterable, Union

import numpy as np

from trajaug.core import (
    RandomnessSpec,
    Trajectory,
    TrajectoryDataset,
    aug_id,
    derive_stream,
    parallel_map,
)
from trajaug.errors import IdCollision, UnknownCandidate
from trajaug.geodesy import destination, destination_on_circle, haversine

# circle radius as a fraction of the gap to the neighbouring point
RADIUS_FRACTION = 0.1


class StretchMode(enum.Enum):
    MIN_POINT = "min"
    MAX_POINT = "max"
    RANDOM_ENDPOINT = "random-endpoint"
    RANDOM_IN_RANGE = "random-in-range"


@dataclass(frozen=True)
class OnCircle:
    name = "on"


@dataclass(frozen=True)
class InCircle:
    name = "in"


@dataclass(frozen=True)
class Stretch:
    mode: StretchMode = StretchMode.RANDOM_IN_RANGE
    max_distance: float = 20.0
    bearing: float = 0.0
    name = "stretch"

    def __post_init__(self):
        if not self.max_distance > 0:
            raise ValueError(f"max_distance must be > 0, got {self.max_distance}")
        object.__setattr__(self, "mode", StretchMode(self.mode))
        object.__setattr__(self, "bearing", float(self.bearing) % 360.0)


@dataclass(frozen=True)
class Drop:
    p_drop: float = 0.2
    name = "drop"

    def __post_init__(self):
        if not 0.0 <= self.p_drop <= 1.0:
            raise ValueError(f"p_drop must be in [0, 1], got {self.p_drop}")


ModificationStrategy = Union[OnCircle, InCircle, Stretch, Drop]


def circle_radii(traj: Trajectory) -> np.ndarray:
    """Per-point radius: 10% of the gap to the next point; the last point
    reuses the previous gap."""
    gaps = haversine(traj.lat[:-1], traj.lon[:-1], traj.lat[1:], traj.lon[1:])
    return RADIUS_FRACTION * np.append(gaps, gaps[-1])


def circle_radius(traj: Trajectory, i: int) -> float:
    n = len(traj)
    if not -n <= i < n:
        raise IndexError(i)
    return float(circle_radii(traj)[i])


def _displace(traj: Trajectory, bearings, distances) -> Trajectory:
    lat, lon = destination(traj.lat, traj.lon, bearings, distances)
    return traj.with_positions(lat, lon)


def modify_on_circle(traj: Trajectory, stream: np.random.Generator) -> Trajectory:
    theta = stream.uniform(0.0, 360.0, len(traj))
    lat, lon = destination_on_circle(traj.lat, traj.lon, theta, circle_radii(traj))
    return traj.with_positions(lat, lon)


def _pull_inside(traj: Trajectory, bearings, dist, limit) -> tuple[np.ndarray, np.ndarray]:
    """Displace along ``bearings`` by ``dist`` (<= ``limit``), then walk back
    any point that rounding to float64 degrees left beyond ``limit``."""
    bearings = np.broadcast_to(np.asarray(bearings, dtype=np.float64), dist.shape)
    lat, lon = destination(traj.lat, traj.lon, bearings, dist)
    for step in range(8):
        d = haversine(traj.lat, traj.lon, lat, lon)
        over = np.flatnonzero(d > limit)
        if over.size == 0:
            return lat, lon
        shrink = np.maximum(2.0 * (d[over] - limit[over]), 1e-9 * limit[over]) * 2.0**step
        dist[over] = np.maximum(dist[over] - shrink, 0.0)
        lat[over], lon[over] = destination(traj.lat[over], traj.lon[over], bearings[over], dist[over])
    over = haversine(traj.lat, traj.lon, lat, lon) > limit
    lat[over], lon[over] = traj.lat[over], traj.lon[over]
    return lat, lon


def modify_in_circle(traj: Trajectory, stream: np.random.Generator) -> Trajectory:
    n = len(traj)
    theta = stream.uniform(0.0, 360.0, n)
    radii = circle_radii(traj)
    # draws within coordinate resolution of the rim can round to just outside
    lat, lon = _pull_inside(traj, theta, stream.uniform(0.0, 1.0, n) * radii, radii)
    return traj.with_positions(lat, lon)


def modify_stretch(
    traj: Trajectory,
    mode: StretchMode | str,
    max_distance: float,
    bearing: float,
    stream: np.random.Generator | None = None,
) -> Trajectory:
    """Move every point along one line through it at the given bearing.

    ``MAX_POINT`` moves ``max_distance`` along ``bearing``; ``MIN_POINT`` the
    same distance the opposite way. The random modes pick one of those ends
    per point, or a uniform signed offset in between.
    """
    mode = StretchMode(mode)
    if not max_distance > 0:
        raise ValueError("max_distance must be > 0")
    n = len(traj)
    if mode is StretchMode.MAX_POINT:
        offset = np.full(n, float(max_distance))
    elif mode is StretchMode.MIN_POINT:
        offset = np.full(n, -float(max_distance))
    elif mode is StretchMode.RANDOM_ENDPOINT:
        offset = np.where(stream.random(n) < 0.5, -1.0, 1.0) * max_distance
    else:
        offset = stream.uniform(-max_distance, max_distance, n)
        bearings = np.where(offset >= 0, bearing, bearing + 180.0)
        lat, lon = _pull_inside(traj, bearings, np.abs(offset), np.full(n, float(max_distance)))
        return traj.with_positions(lat, lon)
    bearings = np.where(offset >= 0, bearing, bearing + 180.0)
    return _displace(traj, bearings, np.abs(offset))


def modify_drop(traj: Trajectory, p_drop: float, stream: np.random.Generator) -> Trajectory:
    """Drop each interior point with probability ``p_drop``; endpoints stay."""
    if not 0.0 <= p_drop <= 1.0:
        raise ValueError("p_drop must be in [0, 1]")
    keep = np.ones(len(traj), dtype=bool)
    keep[1:-1] = stream.random(len(traj) - 2) >= p_drop
    return traj if keep.all() else traj.take(keep)


def modify(traj: Trajectory, strategy: ModificationStrategy, stream: np.random.Generator) -> Trajectory:
    if isinstance(strategy, OnCircle):
        return modify_on_circle(traj, stream)
    if isinstance(strategy, InCircle):
        return modify_in_circle(traj, stream)
    if isinstance(strategy, Stretch):
        return modify_stretch(traj, strategy.mode, strategy.max_distance, strategy.bearing, stream)
    if isinstance(strategy, Drop):
        return modify_drop(traj, strategy.p_drop, stream)
    raise TypeError(f"unknown modification strategy {strategy!r}")


def synthesize(
    traj: Trajectory, strategy: ModificationStrategy, spec: RandomnessSpec, k: int
) -> Trajectory:
    """The k-th synthetic copy of ``traj``, id ``{traj.id}#aug{k}``."""
    out = modify(traj, strategy, derive_stream(spec, traj.id, k))
    return out.replace(id=aug_id(traj.id, k))


def _synthesize_job(job, strategy, spec):
    traj, k = job
    return synthesize(traj, strategy, spec, k)


def generate(
    ds: TrajectoryDataset,
    jobs: Iterable[tuple[str, int]],
    strategy: ModificationStrategy,
    spec: RandomnessSpec,
    workers: int = 1,
) -> TrajectoryDataset:
    """Append one synthetic trajectory per ``(orig_id, k)`` job to ``ds``."""
    pairs = []
    for orig_id, k in jobs:
        if orig_id not in ds:
            raise UnknownCandidate(orig_id)
        new_id = aug_id(orig_id, k)
        if new_id in ds:
            raise IdCollision(new_id)
        pairs.append((ds[orig_id], k))
    made = parallel_map(partial(_synthesize_job, strategy=strategy, spec=spec), pairs, workers)
    return ds.with_trajectories(made)


def augment_dataset(
    ds: TrajectoryDataset,
    candidates: Iterable[str],
    strategy: ModificationStrategy,
    copies: int,
    spec: RandomnessSpec,
    workers: int = 1,
) -> TrajectoryDataset:
    """Originals plus ``copies`` synthetics per candidate."""
    if copies < 1:
        raise ValueError("copies must be >= 1")
    jobs = [(c, k) for c in dict.fromkeys(candidates) for k in range(1, copies + 1)]
    return generate(ds, jobs, strategy, spec, workers)
