"""Seeded evaluation harness: split, strategy grid, baseline model, metrics."""

from __future__ import annotations

import copy
import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache, partial
from importlib import resources
from typing import IO, Hashable, Iterable, Protocol, Sequence

import numpy as np

from trajaug.balancing import balance_dataset
from trajaug.core import (
    RandomnessSpec,
    TrajectoryDataset,
    derive_stream,
    parallel_map,
)
from trajaug.errors import (
    ClassTooSmall,
    ColumnMismatch,
    EmptyInput,
    EmptyTrainingSet,
    LengthMismatch,
    MissingLabelColumn,
    NOutOfRange,
)
from trajaug.kinematics import FEATURE_COLUMNS, SegmentFeatureRow, feature_vector
from trajaug.modification import (
    Drop,
    InCircle,
    ModificationStrategy,
    OnCircle,
    Stretch,
    StretchMode,
    augment_dataset,
)
from trajaug.selection import (
    CandidateSet,
    select_fewest,
    select_proportional,
    select_random,
    select_representative,
    selection_stream,
)

MAX_PI_SEEDS = 1000

SELECTIONS = ("random", "proportional", "fewest", "representative")
MODIFICATIONS = ("on", "in", "stretch", "drop")
STRATEGY_LABELS = (
    ("base",)
    + tuple(f"{s}-selected-{m}" for s in SELECTIONS for m in MODIFICATIONS)
    + tuple(f"balanced-{m}" for m in MODIFICATIONS)
)
RESULTS_HEADER = ("seed", "strategy", "model", "accuracy", "f1_score")


@lru_cache(maxsize=1)
def _pi_decimals() -> str:
    text = resources.files("trajaug").joinpath("data/pi_digits.txt").read_text()
    return text.strip()


def pi_seeds(n: int) -> list[int]:
    """Consecutive 4-digit groups of pi's decimals: 1415, 9265, 3589, ..."""
    if not 1 <= n <= MAX_PI_SEEDS:
        raise NOutOfRange(n, MAX_PI_SEEDS)
    digits = _pi_decimals()
    return [int(digits[4 * i : 4 * i + 4]) for i in range(n)]


def train_test_split(
    ds: TrajectoryDataset, test_fraction: float, stream: np.random.Generator
) -> tuple[TrajectoryDataset, TrajectoryDataset]:
    """Stratified split by whole trajectory.

    Each class puts round(n_c * test_fraction) members in the test set,
    clamped so both sides get at least one.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    if ds.label_column is None:
        raise MissingLabelColumn("splitting requires a labelled dataset")
    train_ids: list[str] = []
    test_ids: list[str] = []
    for label, members in ds.classes().items():
        n = len(members)
        if n < 2:
            raise ClassTooSmall(label, n)
        n_test = min(n - 1, max(1, math.floor(n * test_fraction + 0.5)))
        perm = stream.permutation(n)
        test_ids.extend(members[i] for i in perm[:n_test])
        train_ids.extend(members[i] for i in perm[n_test:])
    return ds.subset(train_ids), ds.subset(test_ids)


def _check_labels(y_true: Sequence, y_pred: Sequence) -> None:
    if len(y_true) != len(y_pred):
        raise LengthMismatch(len(y_true), len(y_pred))
    if len(y_true) == 0:
        raise EmptyInput()


def accuracy(y_true: Sequence[Hashable], y_pred: Sequence[Hashable]) -> float:
    _check_labels(y_true, y_pred)
    return sum(t == p for t, p in zip(y_true, y_pred)) / len(y_true)


def f1_weighted(y_true: Sequence[Hashable], y_pred: Sequence[Hashable]) -> float:
    """Per-class F1 averaged with true-class support as weights."""
    _check_labels(y_true, y_pred)
    support = Counter(y_true)
    predicted = Counter(y_pred)
    hits = Counter(t for t, p in zip(y_true, y_pred) if t == p)
    total = 0.0
    for label, n_true in support.items():
        tp = hits[label]
        precision = tp / predicted[label] if predicted[label] else 0.0
        recall = tp / n_true
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        total += n_true * f1
    return total / len(y_true)


class Classifier(Protocol):
    def fit(self, X: np.ndarray, y: Sequence[str]) -> "Classifier": ...

    def predict(self, X: np.ndarray) -> list[str]: ...


class KNNClassifier:
    """k-nearest neighbours on z-scored features.

    Scaling uses the training mean and sample standard deviation; constant
    columns are zeroed. Vote ties go to the lexicographically smallest label,
    distance ties to the earlier training row.
    """

    def __init__(self, k: int = 5):
        if k < 1 or k % 2 == 0:
            raise ValueError("k must be a positive odd integer")
        self.k = k

    def __repr__(self):
        return f"KNNClassifier(k={self.k})"

    def _scale(self, X: np.ndarray) -> np.ndarray:
        return np.divide(X - self.mean_, self.std_, out=np.zeros_like(X), where=self.std_ > 0)

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        if len(X) == 0:
            raise EmptyTrainingSet()
        self.mean_ = X.mean(axis=0)
        self.std_ = X.std(axis=0, ddof=1) if len(X) > 1 else np.zeros(X.shape[1])
        self.std_ = np.where(np.isfinite(self.std_), self.std_, 0.0)
        self.train_ = self._scale(X)
        self.labels_ = list(y)
        return self

    def predict(self, X):
        Z = self._scale(np.asarray(X, dtype=np.float64))
        d2 = ((Z[:, None, :] - self.train_[None, :, :]) ** 2).sum(axis=2)
        k = min(self.k, len(self.labels_))
        nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
        out = []
        for row in nearest:
            votes = Counter(self.labels_[i] for i in row)
            top = max(votes.values())
            out.append(min(label for label, c in votes.items() if c == top))
        return out


def fit_predict(
    classifier: Classifier,
    train_rows: Sequence[SegmentFeatureRow],
    test_rows: Sequence[SegmentFeatureRow],
) -> list[str]:
    if not train_rows:
        raise EmptyTrainingSet()
    columns = list(train_rows[0].values)
    for row in (*train_rows, *test_rows):
        if list(row.values) != columns:
            raise ColumnMismatch()
    if not test_rows:
        return []
    X_train = np.array([[r.values[c] for c in columns] for r in train_rows])
    X_test = np.array([[r.values[c] for c in columns] for r in test_rows])
    y_train = [r.label for r in train_rows]
    return list(classifier.fit(X_train, y_train).predict(X_test))


def _default_seeds() -> tuple[int, ...]:
    return tuple(pi_seeds(20))


@dataclass(frozen=True)
class ExperimentConfig:
    seeds: tuple[int, ...] = field(default_factory=_default_seeds)
    test_fraction: float = 0.2
    copies: int = 3
    proportion: float = 0.2
    cutoff: float = 0.6
    tolerance: float = 0.5
    max_stretch: float = 20.0
    bearing: float = 0.0
    stretch_mode: StretchMode = StretchMode.RANDOM_IN_RANGE
    drop_probability: float = 0.2
    multiplier: float = 1.1
    label_column: str | None = None
    models: tuple[Classifier, ...] = (KNNClassifier(),)

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError("test_fraction must be in (0, 1)")
        if self.copies < 1:
            raise ValueError("copies must be >= 1")
        if not self.models:
            raise ValueError("at least one model is required")

    def modifications(self) -> dict[str, ModificationStrategy]:
        return {
            "on": OnCircle(),
            "in": InCircle(),
            "stretch": Stretch(self.stretch_mode, self.max_stretch, self.bearing),
            "drop": Drop(self.drop_probability),
        }


@dataclass(frozen=True)
class ExperimentResultRow:
    seed: int
    strategy: str
    model: str
    accuracy: float
    f1: float


@dataclass
class SeedPlan:
    """Everything one seed trains on, keyed by strategy label."""

    seed: int
    train: TrajectoryDataset
    test: TrajectoryDataset
    candidates: dict[str, CandidateSet]
    training_sets: dict[str, TrajectoryDataset]


def select_candidates(
    train: TrajectoryDataset, cfg: ExperimentConfig, spec: RandomnessSpec
) -> dict[str, CandidateSet]:
    return {
        "random": select_random(train, cfg.proportion, selection_stream(spec, "random")),
        "proportional": select_proportional(train, cfg.proportion, selection_stream(spec, "proportional")),
        "fewest": select_fewest(train, cfg.proportion),
        "representative": select_representative(train, cfg.cutoff, cfg.tolerance),
    }


def prepare_seed(ds: TrajectoryDataset, cfg: ExperimentConfig, seed: int) -> SeedPlan:
    """Split, pre-select candidates, pre-balance, then build all 21 training sets."""
    if cfg.label_column is not None and ds.label_column is None:
        ds = TrajectoryDataset(list(ds), cfg.label_column)
    spec = RandomnessSpec(seed)
    train, test = train_test_split(ds, cfg.test_fraction, derive_stream(spec, "split", 0))
    candidates = select_candidates(train, cfg, spec)
    mods = cfg.modifications()
    balanced = {m: balance_dataset(train, cfg.multiplier, mods[m], spec) for m in MODIFICATIONS}

    sets: dict[str, TrajectoryDataset] = {}
    for label in STRATEGY_LABELS:
        if label == "base":
            sets[label] = train
        elif label.startswith("balanced-"):
            sets[label] = balanced[label.removeprefix("balanced-")]
        else:
            sel, mod = label.split("-selected-")
            sets[label] = augment_dataset(train, candidates[sel], mods[mod], cfg.copies, spec)
    return SeedPlan(seed, train, test, candidates, sets)


def _rows(ds: TrajectoryDataset, cached: dict[str, np.ndarray], known: TrajectoryDataset):
    rows = []
    for traj in ds:
        vec = cached[traj.id] if traj.id in known else feature_vector(traj)
        rows.append(SegmentFeatureRow(traj.id, traj.label, dict(zip(FEATURE_COLUMNS, vec.tolist()))))
    return rows


def run_seed(
    ds: TrajectoryDataset,
    cfg: ExperimentConfig,
    seed: int,
    cached: dict[str, np.ndarray] | None = None,
) -> list[ExperimentResultRow]:
    if cached is None:
        cached = {t.id: feature_vector(t) for t in ds}
    plan = prepare_seed(ds, cfg, seed)
    test_rows = _rows(plan.test, cached, plan.test)
    y_true = [r.label for r in test_rows]
    out = []
    for label in STRATEGY_LABELS:
        train_rows = _rows(plan.training_sets[label], cached, plan.train)
        for model in cfg.models:
            model = copy.deepcopy(model)
            if hasattr(model, "random_state"):
                model.random_state = seed
            y_pred = fit_predict(model, train_rows, test_rows)
            out.append(
                ExperimentResultRow(
                    seed, label, type(model).__name__, accuracy(y_true, y_pred), f1_weighted(y_true, y_pred)
                )
            )
    return out


def run_experiment(
    ds: TrajectoryDataset, cfg: ExperimentConfig, workers: int = 1
) -> list[ExperimentResultRow]:
    """One result row per (seed, strategy label, model), in that order."""
    cached = {t.id: feature_vector(t) for t in ds}
    per_seed = parallel_map(partial(run_seed, ds, cfg, cached=cached), list(cfg.seeds), workers)
    return [row for rows in per_seed for row in rows]


def write_results_csv(rows: Iterable[ExperimentResultRow], out: IO[str]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for r in rows:
        writer.writerow([r.seed, r.strategy, r.model, repr(r.accuracy), repr(r.f1)])
