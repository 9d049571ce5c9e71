"""Choosing which training trajectories become augmentation candidates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Union

import numpy as np

from trajaug.core import RandomnessSpec, TrajectoryDataset, derive_stream, id_sort_key
from trajaug.errors import EmptyDataset, MissingLabelColumn
from trajaug.kinematics import dataset_features, feature_matrix

# absolute floor added to |reference| in the closeness test
CLOSENESS_FLOOR = 1e-9


def selection_stream(spec: RandomnessSpec, name: str) -> np.random.Generator:
    """The stream a seeded run uses for the named selection strategy."""
    return derive_stream(spec, f"select:{name}", 0)


def _check_proportion(p: float) -> None:
    if not 0.0 < p <= 1.0:
        raise ValueError(f"proportion must be in (0, 1], got {p}")


def selection_count(n: int, proportion: float) -> int:
    """max(1, floor(n * proportion)), never more than n."""
    return min(n, max(1, math.floor(n * proportion)))


@dataclass(frozen=True)
class RandomSelection:
    proportion: float = 0.2

    def __post_init__(self):
        _check_proportion(self.proportion)


@dataclass(frozen=True)
class ProportionalSelection:
    proportion: float = 0.2

    def __post_init__(self):
        _check_proportion(self.proportion)


@dataclass(frozen=True)
class FewestSelection:
    proportion: float = 0.2

    def __post_init__(self):
        _check_proportion(self.proportion)


@dataclass(frozen=True)
class RepresentativeSelection:
    cutoff: float = 0.6
    tolerance: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.cutoff <= 1.0:
            raise ValueError(f"cutoff must be in (0, 1], got {self.cutoff}")
        if not self.tolerance > 0.0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")


SelectionStrategy = Union[RandomSelection, ProportionalSelection, FewestSelection, RepresentativeSelection]


@dataclass(frozen=True)
class CandidateSet:
    traj_ids: tuple[str, ...]
    strategy: SelectionStrategy

    def __len__(self):
        return len(self.traj_ids)

    def __iter__(self):
        return iter(self.traj_ids)

    def __contains__(self, traj_id):
        return traj_id in self.traj_ids

    def write(self, out: IO[str]) -> None:
        """Newline-delimited ids."""
        for traj_id in self.traj_ids:
            out.write(traj_id + "\n")

    @staticmethod
    def read(src: IO[str]) -> list[str]:
        return [line.rstrip("\n") for line in src if line.strip()]


def _canonical(ids) -> tuple[str, ...]:
    return tuple(sorted(ids, key=id_sort_key))


def select_random(ds: TrajectoryDataset, proportion: float, stream: np.random.Generator) -> CandidateSet:
    _check_proportion(proportion)
    if len(ds) == 0:
        raise EmptyDataset()
    ids = ds.ids
    picked = stream.choice(len(ids), size=selection_count(len(ids), proportion), replace=False)
    return CandidateSet(_canonical(ids[i] for i in picked), RandomSelection(proportion))


def select_proportional(
    ds: TrajectoryDataset, proportion: float, stream: np.random.Generator
) -> CandidateSet:
    """Sample the same proportion from every class independently."""
    _check_proportion(proportion)
    if ds.label_column is None:
        raise MissingLabelColumn("proportional selection requires a labelled dataset")
    chosen: list[str] = []
    for members in ds.classes().values():
        picked = stream.choice(len(members), size=selection_count(len(members), proportion), replace=False)
        chosen.extend(members[i] for i in picked)
    return CandidateSet(_canonical(chosen), ProportionalSelection(proportion))


def select_fewest(ds: TrajectoryDataset, proportion: float) -> CandidateSet:
    """The trajectories with the fewest points; ties go to the smaller id."""
    _check_proportion(proportion)
    if len(ds) == 0:
        raise EmptyDataset()
    ranked = sorted(ds, key=lambda t: (len(t), id_sort_key(t.id)))
    k = selection_count(len(ranked), proportion)
    return CandidateSet(_canonical(t.id for t in ranked[:k]), FewestSelection(proportion))


def closeness_fractions(ds: TrajectoryDataset, tolerance: float) -> dict[str, float]:
    """Per trajectory, the fraction of feature statistics within tolerance of
    the dataset-wide reference (column mean)."""
    rows = dataset_features(ds)
    x = feature_matrix(rows)
    with np.errstate(over="ignore", invalid="ignore"):
        ref = x.mean(axis=0)
    considered = np.isfinite(ref)
    if not considered.any():
        return {r.traj_id: 0.0 for r in rows}
    xs, ref = x[:, considered], ref[considered]
    close = np.abs(xs - ref) <= tolerance * (np.abs(ref) + CLOSENESS_FLOOR)
    frac = close.sum(axis=1) / considered.sum()
    return {r.traj_id: float(f) for r, f in zip(rows, frac)}


def select_representative(ds: TrajectoryDataset, cutoff: float, tolerance: float) -> CandidateSet:
    """Trajectories whose statistics mostly sit near the dataset's.

    May legitimately return nothing or everything.
    """
    strategy = RepresentativeSelection(cutoff, tolerance)
    if len(ds) == 0:
        raise EmptyDataset()
    fractions = closeness_fractions(ds, tolerance)
    return CandidateSet(_canonical(i for i, f in fractions.items() if f >= cutoff), strategy)


def select(
    ds: TrajectoryDataset, strategy: SelectionStrategy, stream: np.random.Generator | None = None
) -> CandidateSet:
    if isinstance(strategy, RandomSelection):
        return select_random(ds, strategy.proportion, _need(stream))
    if isinstance(strategy, ProportionalSelection):
        return select_proportional(ds, strategy.proportion, _need(stream))
    if isinstance(strategy, FewestSelection):
        return select_fewest(ds, strategy.proportion)
    if isinstance(strategy, RepresentativeSelection):
        return select_representative(ds, strategy.cutoff, strategy.tolerance)
    raise TypeError(f"unknown selection strategy {strategy!r}")


def _need(stream):
    if stream is None:
        raise ValueError("this selection strategy needs a random stream")
    return stream
