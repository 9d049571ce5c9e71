"""Point-based trajectory types, dataset validation and seeded random streams."""

from __future__ import annotations

import hashlib
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, Iterable, Iterator, Mapping, Sequence, TypeVar

import numpy as np

from trajaug.errors import (
    DuplicateId,
    DuplicateTimestamp,
    InvalidCoordinate,
    MissingLabel,
    ReservedColumn,
    TooFewPoints,
)

RESERVED_COLUMNS = frozenset({"traj_id", "DateTime", "lat", "lon"})

_AUG_SUFFIX = re.compile(r"^(.*)#aug(\d+)$")

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0 and -180.0 <= self.lon <= 180.0):
            raise ValueError(f"coordinate out of range: ({self.lat}, {self.lon})")


@dataclass(frozen=True)
class TrajectoryPoint:
    timestamp: datetime
    position: GeoPoint
    extras: Mapping[str, str] = field(default_factory=dict)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class Trajectory:
    """An identified, time-ordered sequence of geo-points.

    Storage is columnar: ``times`` (``datetime64[us]``), ``lat`` and ``lon``
    arrays plus ``extras`` mapping each pass-through column to one string per
    point. Arrays are read-only; transformations return new instances.
    Construction does not validate ordering; use :func:`validate_dataset`
    or :meth:`validated`.
    """

    __slots__ = ("id", "times", "lat", "lon", "extras", "label")

    def __init__(
        self,
        id: str,
        times: Sequence | np.ndarray,
        lat: Sequence[float] | np.ndarray,
        lon: Sequence[float] | np.ndarray,
        extras: Mapping[str, Sequence[str]] | None = None,
        label: str | None = None,
    ):
        times = np.array(times, dtype="datetime64[us]")
        lat = np.array(lat, dtype=np.float64)
        lon = np.array(lon, dtype=np.float64)
        n = len(times)
        if lat.shape != (n,) or lon.shape != (n,):
            raise ValueError("times, lat and lon must be 1-D and equally long")
        cols: dict[str, tuple[str, ...]] = {}
        for name, values in (extras or {}).items():
            if name in RESERVED_COLUMNS:
                raise ReservedColumn(name)
            values = tuple(values)
            if len(values) != n:
                raise ValueError(f"extra column {name!r} has {len(values)} values for {n} points")
            cols[name] = values
        object.__setattr__(self, "id", str(id))
        object.__setattr__(self, "times", _readonly(times))
        object.__setattr__(self, "lat", _readonly(lat))
        object.__setattr__(self, "lon", _readonly(lon))
        object.__setattr__(self, "extras", cols)
        object.__setattr__(self, "label", label)

    def __setattr__(self, name, value):
        raise AttributeError("Trajectory is immutable")

    def __reduce__(self):
        return (
            Trajectory,
            (self.id, self.times, self.lat, self.lon, self.extras, self.label),
        )

    @classmethod
    def from_points(
        cls, id: str, points: Iterable[TrajectoryPoint], label: str | None = None
    ) -> Trajectory:
        points = list(points)
        names: list[str] = []
        for p in points:
            for name in p.extras:
                if name not in names:
                    names.append(name)
        return cls(
            id,
            [np.datetime64(p.timestamp, "us") for p in points],
            [p.position.lat for p in points],
            [p.position.lon for p in points],
            {name: [p.extras.get(name, "") for p in points] for name in names},
            label,
        )

    def __len__(self) -> int:
        return len(self.times)

    @property
    def points(self) -> list[TrajectoryPoint]:
        out = []
        for i in range(len(self)):
            out.append(
                TrajectoryPoint(
                    self.times[i].astype(datetime),
                    GeoPoint(float(self.lat[i]), float(self.lon[i])),
                    {name: values[i] for name, values in self.extras.items()},
                )
            )
        return out

    def seconds(self) -> np.ndarray:
        """Timestamps as float seconds relative to the first point."""
        return (self.times - self.times[0]) / np.timedelta64(1, "s")

    def replace(self, **changes) -> Trajectory:
        kwargs = dict(
            id=self.id,
            times=self.times,
            lat=self.lat,
            lon=self.lon,
            extras=self.extras,
            label=self.label,
        )
        kwargs.update(changes)
        return Trajectory(**kwargs)

    def with_positions(self, lat: np.ndarray, lon: np.ndarray) -> Trajectory:
        return self.replace(lat=lat, lon=lon)

    def take(self, index: np.ndarray) -> Trajectory:
        """Subset of points at ``index`` (integer array or boolean mask)."""
        index = np.asarray(index)
        if index.dtype == bool:
            index = np.flatnonzero(index)
        return self.replace(
            times=self.times[index],
            lat=self.lat[index],
            lon=self.lon[index],
            extras={k: tuple(v[i] for i in index) for k, v in self.extras.items()},
        )

    def validated(self) -> Trajectory:
        """Return this trajectory sorted by time, checking every invariant."""
        if len(self) < 2:
            raise TooFewPoints(self.id, len(self))
        bad = ~(
            np.isfinite(self.lat)
            & np.isfinite(self.lon)
            & (np.abs(self.lat) <= 90.0)
            & (np.abs(self.lon) <= 180.0)
        )
        if bad.any():
            raise InvalidCoordinate(self.id, int(np.flatnonzero(bad)[0]))
        if np.isnat(self.times).any():
            raise InvalidCoordinate(self.id, int(np.flatnonzero(np.isnat(self.times))[0]))
        order = np.argsort(self.times, kind="stable")
        traj = self if np.all(order == np.arange(len(self))) else self.take(order)
        dup = np.flatnonzero(np.diff(traj.times) == np.timedelta64(0, "us"))
        if len(dup):
            raise DuplicateTimestamp(self.id, traj.times[dup[0]])
        return traj

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.id == other.id
            and self.label == other.label
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.lat, other.lat)
            and np.array_equal(self.lon, other.lon)
            and self.extras == other.extras
        )

    __hash__ = None

    def __repr__(self):
        return f"Trajectory(id={self.id!r}, points={len(self)}, label={self.label!r})"


def id_sort_key(traj_id: str) -> tuple:
    """Canonical ordering: originals lexicographically, each followed by its
    ``#aug{k}`` synthetics in numeric ``k`` order."""
    parts = []
    while m := _AUG_SUFFIX.match(traj_id):
        parts.append(int(m.group(2)))
        traj_id = m.group(1)
    return (traj_id, tuple(reversed(parts)))


def split_aug_id(traj_id: str) -> tuple[str, int] | None:
    """``"A#aug3"`` -> ``("A", 3)``; ``None`` for non-synthetic ids."""
    m = _AUG_SUFFIX.match(traj_id)
    return (m.group(1), int(m.group(2))) if m else None


def aug_id(orig_id: str, k: int) -> str:
    return f"{orig_id}#aug{k}"


class TrajectoryDataset:
    """Trajectories keyed by id, always held in canonical id order."""

    __slots__ = ("trajectories", "label_column")

    def __init__(
        self,
        trajectories: Mapping[str, Trajectory] | Iterable[Trajectory],
        label_column: str | None = None,
    ):
        if isinstance(trajectories, Mapping):
            items = list(trajectories.values())
            for key, traj in trajectories.items():
                if key != traj.id:
                    raise ValueError(f"key {key!r} does not match trajectory id {traj.id!r}")
        else:
            items = list(trajectories)
        by_id: dict[str, Trajectory] = {}
        for traj in items:
            if traj.id in by_id:
                raise DuplicateId(traj.id)
            by_id[traj.id] = traj
        ordered = {k: by_id[k] for k in sorted(by_id, key=id_sort_key)}
        object.__setattr__(self, "trajectories", ordered)
        object.__setattr__(self, "label_column", label_column)

    def __setattr__(self, name, value):
        raise AttributeError("TrajectoryDataset is immutable")

    def __reduce__(self):
        return (TrajectoryDataset, (list(self.trajectories.values()), self.label_column))

    def __len__(self) -> int:
        return len(self.trajectories)

    def __iter__(self) -> Iterator[Trajectory]:
        return iter(self.trajectories.values())

    def __getitem__(self, traj_id: str) -> Trajectory:
        return self.trajectories[traj_id]

    def __contains__(self, traj_id: object) -> bool:
        return traj_id in self.trajectories

    def __eq__(self, other):
        if not isinstance(other, TrajectoryDataset):
            return NotImplemented
        return (
            self.label_column == other.label_column
            and list(self.trajectories) == list(other.trajectories)
            and all(a == b for a, b in zip(self, other))
        )

    __hash__ = None

    def __repr__(self):
        return f"TrajectoryDataset({len(self)} trajectories, label_column={self.label_column!r})"

    @property
    def ids(self) -> list[str]:
        return list(self.trajectories)

    def subset(self, ids: Iterable[str]) -> TrajectoryDataset:
        return TrajectoryDataset([self.trajectories[i] for i in ids], self.label_column)

    def with_trajectories(self, extra: Iterable[Trajectory]) -> TrajectoryDataset:
        return TrajectoryDataset([*self, *extra], self.label_column)

    def classes(self) -> dict[str, list[str]]:
        """Class label -> member ids, both in canonical order."""
        out: dict[str, list[str]] = {}
        for traj in self:
            out.setdefault(traj.label, []).append(traj.id)
        return {k: out[k] for k in sorted(out)}


def validate_dataset(raw: TrajectoryDataset) -> TrajectoryDataset:
    """Sort each trajectory by time and enforce all dataset invariants."""
    out = []
    for traj in raw:
        traj = traj.validated()
        if raw.label_column is not None and not traj.label:
            raise MissingLabel(traj.id)
        out.append(traj)
    return TrajectoryDataset(out, raw.label_column)


@dataclass(frozen=True)
class RandomnessSpec:
    master_seed: int

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")


def stream_key(spec: RandomnessSpec, traj_id: str, copy_index: int) -> int:
    """Stable 64-bit hash of ``(master_seed, traj_id, copy_index)``."""
    if copy_index < 0:
        raise ValueError("copy_index must be non-negative")
    h = hashlib.blake2b(digest_size=8, person=b"trajaug.stream")
    h.update(spec.master_seed.to_bytes(8, "little"))
    h.update(copy_index.to_bytes(8, "little"))
    h.update(traj_id.encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


def derive_stream(spec: RandomnessSpec, traj_id: str, copy_index: int) -> np.random.Generator:
    """Independent random stream for one (trajectory, copy) pair.

    Streams are keyed by content rather than drawn from a shared sequence,
    so results do not depend on the order in which work is scheduled.
    """
    return np.random.Generator(np.random.PCG64(stream_key(spec, traj_id, copy_index)))


def parallel_map(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> list[R]:
    """Order-preserving map, in-process or over a process pool."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    chunksize = max(1, math.ceil(len(items) / (4 * workers)))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))
