import io
import math

import numpy as np
import pytest

from helpers import class_sized_dataset, random_dataset, speed_regime_dataset
from trajaug.core import RandomnessSpec, derive_stream, split_aug_id
from trajaug.errors import ClassTooSmall, EmptyInput, EmptyTrainingSet, LengthMismatch, NOutOfRange
from trajaug.evaluation import (
    RESULTS_HEADER,
    STRATEGY_LABELS,
    ExperimentConfig,
    KNNClassifier,
    accuracy,
    f1_weighted,
    fit_predict,
    pi_seeds,
    prepare_seed,
    run_experiment,
    train_test_split,
    write_results_csv,
)
from trajaug.kinematics import SegmentFeatureRow

TABLE_SEEDS = {781, 899, 1058, 1415, 1971, 2097, 2643, 2862, 2884, 3589,
               3832, 3846, 4944, 5923, 6406, 6939, 7932, 7950, 9265, 9375}


def machin_pi_decimals(n):
    """Decimals of pi via Machin's formula in integer fixed point."""
    scale = 10 ** (n + 10)

    def arctan_inv(x):
        total, term, k, sign = 0, scale // x, 1, 1
        while term:
            total += sign * (term // k)
            term //= x * x
            k += 2
            sign = -sign
        return total

    pi = 4 * (4 * arctan_inv(5) - arctan_inv(239))
    return str(pi)[1 : n + 1]


def confusion_oracle(y_true, y_pred):
    labels = sorted(set(y_true) | set(y_pred))
    idx = {c: i for i, c in enumerate(labels)}
    m = [[0] * len(labels) for _ in labels]
    for t, p in zip(y_true, y_pred):
        m[idx[t]][idx[p]] += 1
    n = len(y_true)
    acc = sum(m[i][i] for i in range(len(labels))) / n
    f1 = 0.0
    for i in range(len(labels)):
        support = sum(m[i])
        if not support:
            continue
        col = sum(row[i] for row in m)
        p = m[i][i] / col if col else 0.0
        r = m[i][i] / support
        f1 += support * (2 * p * r / (p + r) if p + r else 0.0)
    return acc, f1 / n


class TestPiSeeds:
    def test_first_three(self):
        assert pi_seeds(3) == [1415, 9265, 3589]

    def test_table_set(self):
        seeds = pi_seeds(20)
        assert set(seeds) == TABLE_SEEDS
        assert seeds[16] == 781

    def test_against_machin(self):
        digits = machin_pi_decimals(4000)
        assert pi_seeds(1000) == [int(digits[4 * i : 4 * i + 4]) for i in range(1000)]

    @pytest.mark.parametrize("n", [0, 1001, -3])
    def test_out_of_range(self, n):
        with pytest.raises(NOutOfRange):
            pi_seeds(n)


class TestSplit:
    def test_stratified_sizes(self):
        ds = class_sized_dataset({"A": 40, "B": 10, "C": 3})
        train, test = train_test_split(ds, 0.2, np.random.default_rng(0))
        assert {c: len(v) for c, v in test.classes().items()} == {"A": 8, "B": 2, "C": 1}
        assert len(train) + len(test) == len(ds)
        assert not set(train.ids) & set(test.ids)

    def test_at_least_one_each_side(self):
        ds = class_sized_dataset({"A": 2})
        for frac in (0.01, 0.99):
            train, test = train_test_split(ds, frac, np.random.default_rng(0))
            assert len(train) == len(test) == 1

    def test_deterministic(self):
        ds = random_dataset(np.random.default_rng(1), 30)
        a = train_test_split(ds, 0.3, derive_stream(RandomnessSpec(5), "split", 0))
        b = train_test_split(ds, 0.3, derive_stream(RandomnessSpec(5), "split", 0))
        assert a[1].ids == b[1].ids

    def test_class_too_small(self):
        with pytest.raises(ClassTooSmall):
            train_test_split(class_sized_dataset({"A": 5, "B": 1}), 0.2, np.random.default_rng(0))


class TestMetrics:
    def test_hand_example(self):
        t, p = ["A", "A", "B", "B"], ["A", "B", "B", "B"]
        assert accuracy(t, p) == 0.75
        assert f1_weighted(t, p) == pytest.approx(0.7333333333333333, abs=1e-9)

    def test_perfect(self):
        assert accuracy(["x", "y"], ["x", "y"]) == 1.0
        assert f1_weighted(["x", "y"], ["x", "y"]) == 1.0

    def test_match_confusion_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(1000):
            n = int(rng.integers(1, 40))
            k = int(rng.integers(1, 5))
            t = [f"c{v}" for v in rng.integers(0, k, n)]
            p = [f"c{v}" for v in rng.integers(0, k + 1, n)]
            acc, f1 = confusion_oracle(t, p)
            assert abs(accuracy(t, p) - acc) <= 1e-12
            assert abs(f1_weighted(t, p) - f1) <= 1e-12

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            accuracy(["a"], ["a", "b"])
        with pytest.raises(EmptyInput):
            f1_weighted([], [])


class TestKNN:
    def test_nearest_label(self):
        X = np.array([[0.0, 0.0], [0.1, 0.0], [10.0, 10.0], [10.1, 10.0]])
        model = KNNClassifier(1).fit(X, ["a", "a", "b", "b"])
        assert model.predict(np.array([[0.2, 0.1], [9.0, 9.5]])) == ["a", "b"]

    def test_vote_tie_goes_to_smallest_label(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        model = KNNClassifier(3).fit(X, ["b", "a", "c", "z"])
        assert model.predict(np.array([[1.0]])) == ["a"]

    def test_constant_columns_ignored(self):
        X = np.array([[0.0, 5.0], [1.0, 5.0], [9.0, 5.0]])
        model = KNNClassifier(1).fit(X, ["a", "b", "c"])
        assert model.predict(np.array([[0.9, 1000.0]])) == ["b"]

    def test_even_k_rejected(self):
        with pytest.raises(ValueError):
            KNNClassifier(4)

    def test_fit_predict_needs_training_rows(self):
        row = SegmentFeatureRow("a", "x", {"f": 1.0})
        with pytest.raises(EmptyTrainingSet):
            fit_predict(KNNClassifier(), [], [row])
        assert fit_predict(KNNClassifier(), [row], []) == []


def test_strategy_labels():
    assert len(STRATEGY_LABELS) == 21
    assert STRATEGY_LABELS[0] == "base"
    assert "representative-selected-drop" in STRATEGY_LABELS
    assert STRATEGY_LABELS[-4:] == ("balanced-on", "balanced-in", "balanced-stretch", "balanced-drop")


def test_seed_plan_keeps_test_out_of_training():
    ds = speed_regime_dataset(n_per_class=15)
    plan = prepare_seed(ds, ExperimentConfig(seeds=(1,)), 1415)
    test_ids = set(plan.test.ids)
    assert not any("#aug" in t for t in test_ids)
    for label, train in plan.training_sets.items():
        bases = {split_aug_id(t)[0] if split_aug_id(t) else t for t in train.ids}
        assert not bases & test_ids, label
    assert plan.training_sets["base"] == plan.train
    for m in ("on", "in", "stretch", "drop"):
        sizes = {len(v) for v in plan.training_sets[f"balanced-{m}"].classes().values()}
        assert len(sizes) == 1


def test_run_experiment_shape_and_csv():
    ds = speed_regime_dataset(n_per_class=10)
    cfg = ExperimentConfig(seeds=(1415, 9265))
    rows = run_experiment(ds, cfg)
    assert len(rows) == 42
    assert [r.strategy for r in rows[:21]] == list(STRATEGY_LABELS)
    buf = io.StringIO()
    write_results_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(RESULTS_HEADER)
    assert lines[1].startswith("1415,base,KNNClassifier,")
    assert len(lines) == 43
    assert all(math.isfinite(r.accuracy) and 0 <= r.f1 <= 1 for r in rows)
