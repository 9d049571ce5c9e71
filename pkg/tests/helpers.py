"""Synthetic trajectory builders shared by the test modules."""

from __future__ import annotations

import numpy as np

from trajaug.core import Trajectory, TrajectoryDataset, validate_dataset
from trajaug.geodesy import destination

T0 = np.datetime64("2020-01-01T00:00:00", "us")


def times(n, dt=10.0):
    return T0 + (np.arange(n) * dt * 1e6).astype("timedelta64[us]")


def walk(tid, gaps, *, origin=(45.0, -118.5), headings=None, dt=10.0, label=None, extras=None):
    """Trajectory stepping ``gaps[i]`` meters along ``headings[i]``."""
    gaps = np.asarray(gaps, dtype=float)
    if headings is None:
        headings = np.full(len(gaps), 90.0)
    lat, lon = [origin[0]], [origin[1]]
    for gap, heading in zip(gaps, headings):
        la, lo = destination(lat[-1], lon[-1], heading, gap)
        lat.append(float(la))
        lon.append(float(lo))
    n = len(lat)
    return Trajectory(tid, times(n, dt), lat, lon, extras or {}, label)


def random_walk(tid, rng, *, n=None, speed=5.0, dt=10.0, label=None, origin=None):
    n = n if n is not None else int(rng.integers(5, 40))
    if origin is None:
        origin = (rng.uniform(-60, 60), rng.uniform(-170, 170))
    headings = np.cumsum(rng.normal(0, 20, n - 1)) + rng.uniform(0, 360)
    gaps = speed * dt * rng.uniform(0.7, 1.3, n - 1)
    extras = {"RadNum": [str(i) for i in range(n)]}
    return walk(tid, gaps, origin=origin, headings=headings, dt=dt, label=label, extras=extras)


def random_dataset(rng, n_traj, classes=("A", "B", "C"), label_column="label"):
    trajs = []
    for i in range(n_traj):
        label = classes[int(rng.integers(len(classes)))] if label_column else None
        trajs.append(random_walk(f"t{i:04d}", rng, label=label))
    return validate_dataset(TrajectoryDataset(trajs, label_column))


def speed_regime_dataset(n_per_class=50, seed=0, label_column="vehicle_type"):
    """Two well-separated classes: 1 m/s walkers and 20 m/s drivers."""
    rng = np.random.default_rng(seed)
    trajs = []
    for cls, speed in (("slow", 1.0), ("fast", 20.0)):
        for i in range(n_per_class):
            trajs.append(
                random_walk(
                    f"{cls}{i:03d}", rng, n=int(rng.integers(10, 40)), speed=speed,
                    label=cls, origin=(45.0 + rng.uniform(-0.1, 0.1), -118.5 + rng.uniform(-0.1, 0.1)),
                )
            )
    return validate_dataset(TrajectoryDataset(trajs, label_column))


def class_sized_dataset(sizes: dict[str, int], seed=0, n_points=8, label_column="label"):
    rng = np.random.default_rng(seed)
    trajs = []
    for cls, count in sizes.items():
        for i in range(count):
            trajs.append(random_walk(f"{cls}-{i:04d}", rng, n=n_points, label=cls))
    return validate_dataset(TrajectoryDataset(trajs, label_column))
