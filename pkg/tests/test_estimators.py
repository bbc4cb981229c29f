from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import block_constant_tables, duplicate_pipeline, exhaustive_erm, recount
from strategies import samples
from vcselect.core import Hypothesis, LossSpec, Sample, erm
from vcselect.estimators import (
    RiskEstimatorPlan,
    estimate_model_risk,
    estimate_risks,
    holdout_plan,
    kfold_plan,
)
from vcselect.lattice import Partition, PartitionModel, build_family, enumerate_partitions, refinement_leq


def test_holdout_sizes():
    plan = holdout_plan(100, 0.2)
    assert plan.train_sizes == (80,) and plan.validation_sizes == (20,) and plan.m == 1
    assert plan.pairs[0][1] == tuple(range(80, 100))
    assert holdout_plan(2, 0.5).train_sizes == (1,)
    plan = holdout_plan(10, Fraction(1, 4))
    assert (plan.train_sizes, plan.validation_sizes) == ((8,), (2,))


def test_holdout_rejects_degenerate_split():
    with pytest.raises(ValueError):
        holdout_plan(3, 0.2)
    with pytest.raises(ValueError):
        holdout_plan(10, 0.6)
    with pytest.raises(ValueError):
        holdout_plan(1, 0.5)


def test_kfold_structure():
    plan = kfold_plan(12, 3)
    assert plan.m == 3
    assert plan.validation_sizes == (4, 4, 4) and plan.train_sizes == (8, 8, 8)
    assert plan.pairs[1][1] == (4, 5, 6, 7)
    with pytest.raises(ValueError):
        kfold_plan(12, 5)
    with pytest.raises(ValueError):
        kfold_plan(12, 1)


def test_leave_one_out():
    plan = kfold_plan(4, 4)
    assert [va for _, va in plan.pairs] == [(0,), (1,), (2,), (3,)]


@pytest.mark.parametrize("N,k", [(6, 2), (12, 3), (20, 5), (7, 7)])
def test_kfold_folds_partition_records(N, k):
    plan = kfold_plan(N, k)
    assert sum(plan.validation_sizes) == N
    assert sorted(i for _, va in plan.pairs for i in va) == list(range(N))


def test_plan_validation():
    with pytest.raises(ValueError):
        RiskEstimatorPlan(4, (((0, 1), (1, 2)),))
    with pytest.raises(ValueError):
        RiskEstimatorPlan(4, (((0, 1), ()),))
    with pytest.raises(ValueError):
        RiskEstimatorPlan(4, (((0, 1), (4,)),))


def test_plan_json_roundtrip():
    for plan in (holdout_plan(50, 0.2), kfold_plan(12, 3), RiskEstimatorPlan(5, (((0, 2, 4), (1, 3)),))):
        back = RiskEstimatorPlan.from_json(plan.to_json())
        assert back == plan
    assert kfold_plan(12, 3).to_dict()["pairs"][1] == {"train": [[0, 4], [8, 12]], "validation": [[4, 8]]}


def test_perfect_model_has_zero_estimate():
    S = Sample(2, ((0, 0), (1, 1)) * 6)
    model = PartitionModel(Partition.finest(2))
    assert estimate_model_risk(kfold_plan(12, 3), model, S) == 0


def test_two_fold_average():
    # fold risks 1/4 and 1/2 for the single constant hypothesis
    records = ((0, 0),) * 3 + ((0, 1),) + ((0, 0),) * 2 + ((0, 1),) * 2
    model = [Hypothesis((0,))]
    assert estimate_model_risk(kfold_plan(8, 2), model, Sample(1, records)) == Fraction(3, 8)


def test_plan_sample_mismatch():
    with pytest.raises(ValueError):
        estimate_model_risk(kfold_plan(6, 3), [Hypothesis((0,))], Sample(1, ((0, 0),) * 5))


@settings(max_examples=80)
@given(samples(3, min_size=12, max_size=12), st.sampled_from([str(p) for p in enumerate_partitions(3)]))
def test_kfold_estimate_matches_duplicate_pipeline(S, rgs):
    plan = kfold_plan(12, 3)
    model = PartitionModel(Partition.from_string(rgs))
    expected = duplicate_pipeline(block_constant_tables(model.partition.rgs), S.records, plan.pairs)
    assert estimate_model_risk(plan, model, S) == expected


@given(samples(4, min_size=10, max_size=40))
def test_holdout_is_validation_risk_of_train_minimizer(S):
    plan = holdout_plan(len(S), 0.3) if len(S) * 3 // 10 >= 1 else holdout_plan(len(S), 0.5)
    model = PartitionModel(Partition.from_string("0011"))
    train, val = plan.pairs[0]
    h, _ = erm(model, S.subset(train))
    assert estimate_model_risk(plan, model, S) == recount(h.table, [S.records[i] for i in val])


@given(samples(4, min_size=9, max_size=9))
def test_estimates_in_unit_interval_and_shared_counts(S):
    fam = build_family(4, "all-partitions")
    plan = kfold_plan(9, 3)
    values = estimate_risks(plan, fam.models, S)
    assert values == [estimate_model_risk(plan, m, S) for m in fam.models]
    assert all(0 <= v <= 1 for v in values)


def test_unbounded_loss_estimates_at_least_one():
    loss = LossSpec.simple().shifted()
    S = Sample(2, ((0, 0), (1, 0), (1, 1), (0, 1), (0, 0), (1, 1)))
    for m in build_family(2, "all-partitions").models:
        assert estimate_model_risk(kfold_plan(6, 3), m, S, loss) >= 1


@given(samples(4, min_size=12, max_size=12))
def test_larger_model_fits_each_training_fold_at_least_as_well(S):
    plan = kfold_plan(12, 3)
    parts = enumerate_partitions(4)
    for a in parts:
        for b in parts:
            if not refinement_leq(a, b):
                continue
            for train, _ in plan.pairs:
                sub = [S.records[i] for i in train]
                ra = exhaustive_erm(block_constant_tables(a.rgs), sub)[1]
                rb = erm(PartitionModel(b), S.subset(train))[1]
                assert rb <= ra
