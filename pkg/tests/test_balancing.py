import time
from collections import Counter

import numpy as np
import pytest

from helpers import class_sized_dataset, random_dataset
from trajaug.balancing import allocate_sources, balance_dataset, plan_balance
from trajaug.core import RandomnessSpec, split_aug_id
from trajaug.errors import MissingLabelColumn, MultiplierBelowOne
from trajaug.modification import Drop, InCircle, OnCircle, Stretch, augment_dataset

STRATEGIES = [OnCircle(), InCircle(), Stretch(), Drop()]


@pytest.fixture(scope="module")
def uneven():
    return class_sized_dataset({"A": 50, "B": 100, "C": 75}, n_points=5)


def test_plan_worked_example(uneven):
    plan = plan_balance(uneven, 1.1)
    assert plan.target == 110
    assert plan.per_class_deficit == {"A": 60, "B": 10, "C": 35}


@pytest.mark.parametrize("strategy", STRATEGIES, ids=lambda s: s.name)
def test_every_class_reaches_target(uneven, strategy):
    start = time.perf_counter()
    out = balance_dataset(uneven, 1.1, strategy, RandomnessSpec(7))
    assert time.perf_counter() - start < 1.0
    assert {c: len(ids) for c, ids in out.classes().items()} == {"A": 110, "B": 110, "C": 110}
    assert len(out) == 330
    for tid in uneven.ids:
        assert out[tid] == uneven[tid]


def test_multiplier_one_without_gap_is_identity():
    ds = class_sized_dataset({"A": 4, "B": 4})
    assert balance_dataset(ds, 1.0, OnCircle(), RandomnessSpec(0)) == ds


def test_single_class_doubles():
    ds = class_sized_dataset({"A": 7})
    out = balance_dataset(ds, 2.0, InCircle(), RandomnessSpec(0))
    assert len(out) == 14


def test_sources_used_evenly():
    ds = class_sized_dataset({"A": 3, "B": 10})
    out = balance_dataset(ds, 1.0, OnCircle(), RandomnessSpec(2))
    uses = Counter(split_aug_id(t)[0] for t in out.ids if split_aug_id(t))
    assert sorted(uses.values()) == [2, 2, 3]


def test_allocate_sources_round_robin():
    assert allocate_sources(["a", "b", "c"], 7, [2, 0, 1]) == ["c", "a", "b", "c", "a", "b", "c"]


def test_continues_after_existing_copies():
    ds = class_sized_dataset({"A": 2, "B": 6})
    pre = augment_dataset(ds, [ds.classes()["A"][0]], OnCircle(), 2, RandomnessSpec(0))
    out = balance_dataset(pre, 1.0, OnCircle(), RandomnessSpec(0))
    assert len(out.classes()["A"]) == 6
    assert len(out) == 12


def test_deterministic_and_seed_sensitive():
    ds = random_dataset(np.random.default_rng(0), 30)
    a = balance_dataset(ds, 1.5, OnCircle(), RandomnessSpec(1))
    assert a == balance_dataset(ds, 1.5, OnCircle(), RandomnessSpec(1))
    assert a != balance_dataset(ds, 1.5, OnCircle(), RandomnessSpec(2))


def test_workers_do_not_change_output():
    ds = random_dataset(np.random.default_rng(1), 20)
    one = balance_dataset(ds, 1.3, InCircle(), RandomnessSpec(4), workers=1)
    assert one == balance_dataset(ds, 1.3, InCircle(), RandomnessSpec(4), workers=2)


def test_errors():
    ds = class_sized_dataset({"A": 3})
    with pytest.raises(MultiplierBelowOne):
        plan_balance(ds, 0.9)
    unlabelled = random_dataset(np.random.default_rng(0), 3, label_column=None)
    with pytest.raises(MissingLabelColumn):
        plan_balance(unlabelled, 1.1)
