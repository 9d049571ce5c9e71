"""Raise every class to a common size with synthetic trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass

from trajaug.core import RandomnessSpec, TrajectoryDataset, derive_stream, split_aug_id
from trajaug.errors import MissingLabelColumn, MultiplierBelowOne
from trajaug.modification import ModificationStrategy, generate


@dataclass(frozen=True)
class BalancePlan:
    target: int
    per_class_deficit: dict[str, int]


def plan_balance(ds: TrajectoryDataset, multiplier: float) -> BalancePlan:
    """Target is the largest class size times ``multiplier``, floored."""
    if ds.label_column is None:
        raise MissingLabelColumn("balancing requires a labelled dataset")
    if not multiplier >= 1.0:
        raise MultiplierBelowOne(multiplier)
    counts = {c: len(ids) for c, ids in ds.classes().items()}
    if not counts:
        return BalancePlan(0, {})
    # guard against 100 * 1.1 = 110.00000000000001 style noise
    target = math.floor(max(counts.values()) * multiplier + 1e-9)
    return BalancePlan(target, {c: target - n for c, n in counts.items()})


def allocate_sources(members: list[str], deficit: int, order: list[int]) -> list[str]:
    """Cycle through ``members`` in the given order until ``deficit`` picks."""
    return [members[order[j % len(members)]] for j in range(deficit)]


def balance_dataset(
    ds: TrajectoryDataset,
    multiplier: float,
    strategy: ModificationStrategy,
    spec: RandomnessSpec,
    workers: int = 1,
) -> TrajectoryDataset:
    """Append synthetics until every class holds exactly the planned target.

    Sources within a class are taken round-robin from a seed-shuffled order,
    so each original is used either floor or ceil of deficit/size times.
    Copy indices continue after any ``#aug{k}`` already present.
    """
    plan = plan_balance(ds, multiplier)
    next_k: dict[str, int] = {}
    for traj_id in ds.ids:
        parsed = split_aug_id(traj_id)
        if parsed:
            base, k = parsed
            next_k[base] = max(next_k.get(base, 1), k + 1)

    jobs: list[tuple[str, int]] = []
    for label, members in ds.classes().items():
        deficit = plan.per_class_deficit[label]
        if deficit == 0:
            continue
        sources = [m for m in members if split_aug_id(m) is None] or members
        order = derive_stream(spec, f"balance:{label}", 0).permutation(len(sources)).tolist()
        for src in allocate_sources(sources, deficit, order):
            k = next_k.get(src, 1)
            next_k[src] = k + 1
            jobs.append((src, k))
    return generate(ds, jobs, strategy, spec, workers)
