import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_tables, block_constant_tables, brute_risk, exhaustive_erm, recount
from strategies import distributions, samples
from vcselect.core import Hypothesis, JointDistribution, LossSpec, Sample, all_hypotheses
from vcselect.estimators import holdout_plan, kfold_plan
from vcselect.lattice import CandidateFamily, ExplicitModel, Partition, PartitionModel, build_family, explicit_family
from vcselect.selection import (
    equivalence_classes,
    estimation_errors,
    family_true_risks,
    learn_on_selected,
    mde,
    select_from_risks,
    select_model,
    target_model,
)

SIMPLE = LossSpec.simple()
Y_EQUALS_X = JointDistribution.deterministic((0, 1))


def test_classes_singletons_and_merges():
    classes = equivalence_classes(["a", "b", "c"], [Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)], [1, 1, 1])
    assert [c.members for c in classes] == [("c",), ("b",), ("a",)]
    merged = equivalence_classes(["x", "y"], [Fraction(1, 4)] * 2, [2, 2])
    assert len(merged) == 1 and merged[0].members == ("x", "y")


def test_classes_on_two_points_match_brute_grouping():
    fam = build_family(2, "all-partitions")
    risks = family_true_risks(fam, Y_EQUALS_X)
    classes = equivalence_classes(fam.keys, [risks[k] for k in fam.keys], [m.vc_dim for m in fam.models])
    brute = {}
    for rgs in ("00", "01"):
        r = min(brute_risk(t, Y_EQUALS_X.pmf) for t in block_constant_tables(tuple(map(int, rgs))))
        brute.setdefault((len(set(rgs)), r), []).append(rgs)
    assert sorted(c.members for c in classes) == sorted(tuple(v) for v in brute.values())


def test_target_model_examples():
    full = CandidateFamily((PartitionModel(Partition.finest(3)),))
    assert target_model(full, JointDistribution.uniform(3)).members == ("012",)
    assert target_model(build_family(2), Y_EQUALS_X).members == ("01",)
    P = JointDistribution.deterministic((0, 1, 1, 0))
    star = target_model(build_family(4, "two-block"), P)
    assert star.vc_dim == 2 and star.risk == 0 and star.members == ("0110",)


def test_mde_examples():
    assert mde(build_family(2), Y_EQUALS_X) == Fraction(1, 2)
    assert mde(build_family(2), JointDistribution.deterministic((1, 1))) is None
    fam = build_family(3)
    P = JointDistribution.from_conditional([Fraction(1, 3)] * 3, [Fraction(1, 5), Fraction(1, 2), Fraction(4, 5)])
    dup = CandidateFamily(fam.models + (ExplicitModel("copy", tuple(PartitionModel(Partition.finest(3))), 3),))
    assert mde(dup, P) == mde(fam, P)


@given(distributions(n=3))
def test_mde_invariant_under_loss_shift(P):
    fam = build_family(3)
    assert mde(fam, P, SIMPLE) == mde(fam, P, SIMPLE.shifted())


def test_oracle_estimator_selects_target():
    for P in (Y_EQUALS_X, JointDistribution.deterministic((0, 0, 1, 1))):
        fam = build_family(P.n)
        res = select_from_risks(fam, family_true_risks(fam, P))
        star = target_model(fam, P)
        assert res.selected.members == star.members


def test_strict_minimum_beats_simplicity():
    h = all_hypotheses(2)
    fam = explicit_family([("a", h, 5), ("b", h[:1], 1)])
    res = select_from_risks(fam, {"a": Fraction(1, 4), "b": Fraction(1, 2)})
    assert res.representative == "a"


def test_tie_goes_to_smaller_vc():
    h = all_hypotheses(2)
    fam = explicit_family([("a", h, 3), ("b", h[:2], 2)])
    res = select_from_risks(fam, {"a": Fraction(1, 3), "b": Fraction(1, 3)})
    assert res.representative == "b" and res.selected.vc_dim == 2


@settings(max_examples=40)
@given(samples(4, min_size=15, max_size=15), st.randoms(use_true_random=False))
def test_selection_ignores_family_order(S, rnd):
    fam = build_family(4)
    order = list(range(len(fam.models)))
    rnd.shuffle(order)
    plan = kfold_plan(15, 3)
    a = select_model(fam, S, plan)
    b = select_model(fam.reordered(order), S, plan)
    assert (a.selected, a.representative, a.estimated_risks) == (b.selected, b.representative, b.estimated_risks)


def test_learning_on_singleton_model():
    h = Hypothesis((1, 0))
    fam = CandidateFamily((ExplicitModel("only", (h,), 0),))
    res = learn_on_selected(select_from_risks(fam, {"only": Fraction(0)}), Sample(2, ((0, 0),)))
    assert res.learned == h


def test_learning_finds_zero_loss_member():
    fam = build_family(2)
    res = select_from_risks(fam, {"00": Fraction(1), "01": Fraction(0)})
    res = learn_on_selected(res, Sample(2, ((0, 1), (1, 0), (0, 1))))
    assert res.learned.table == (1, 0) and res.learned_empirical_risk == 0
    with pytest.raises(ValueError):
        learn_on_selected(res, None)


@given(samples(4, min_size=5, max_size=20), st.sampled_from(["0011", "0012", "0000", "0123"]))
def test_learning_matches_member_scan(S, rgs):
    fam = build_family(4)
    res = select_from_risks(fam, {k: Fraction(k != rgs) for k in fam.keys})
    res = learn_on_selected(res, S)
    assert (res.learned.table, res.learned_empirical_risk) == exhaustive_erm(
        block_constant_tables(tuple(map(int, rgs))), S.records
    )


def _pipeline(P, fam, N, M, seed):
    rnd = random.Random(seed)
    atoms = [a for a, w in P.pmf.items()]
    weights = [float(w) for w in P.pmf.values()]
    D = Sample(P.n, tuple(rnd.choices(atoms, weights, k=N)))
    Dt = Sample(P.n, tuple(rnd.choices(atoms, weights, k=M)))
    res = select_model(fam, D, holdout_plan(N, 0.2))
    return learn_on_selected(res, Dt, SIMPLE, P)


def test_errors_zero_when_learned_is_bayes():
    P = JointDistribution.deterministic((0, 0, 1, 1))
    fam = build_family(4)
    res = select_from_risks(fam, family_true_risks(fam, P))
    res = learn_on_selected(res, Sample(4, ((0, 0), (1, 0), (2, 1), (3, 1))), SIMPLE, P)
    rep = estimation_errors(res, P)
    assert rep.type_ii == rep.type_iii == rep.type_iv == 0
    assert rep.type_i == 0


def test_bias_only_case():
    P = JointDistribution.deterministic((0, 1))
    fam = build_family(2)
    res = select_from_risks(fam, {"00": Fraction(0), "01": Fraction(1)})
    res = learn_on_selected(res, Sample(2, ((0, 0), (1, 0))), SIMPLE, P)
    rep = estimation_errors(res, P)
    assert rep.type_ii == 0 and rep.type_iv == rep.type_iii == Fraction(1, 2)


@settings(max_examples=60)
@given(distributions(n=4), st.integers(0, 10**6))
def test_errors_telescope_and_match_enumeration(P, seed):
    fam = build_family(4, "two-block")
    res = _pipeline(P, fam, 20, 15, seed)
    rep = estimation_errors(res, P)
    assert rep.type_iv == rep.type_ii + rep.type_iii
    assert min(rep.type_i, rep.type_ii, rep.type_iii, rep.type_iv) >= 0
    members = block_constant_tables(tuple(map(int, res.representative)))
    sup = max(abs(recount(t, res.independent_sample.records) - brute_risk(t, P.pmf)) for t in members)
    assert rep.type_i == sup
    bayes = min(brute_risk(t, P.pmf) for t in all_tables(4))
    assert rep.type_iv == brute_risk(res.learned.table, P.pmf) - bayes
    assert rep.type_ii <= 2 * rep.type_i


def test_relative_errors():
    P = JointDistribution.from_conditional([Fraction(1, 2)] * 2, [Fraction(1, 4), Fraction(1, 2)])
    fam = build_family(2)
    res = _pipeline(P, fam, 20, 10, 3)
    rep = estimation_errors(res, P, relative=True)
    assert rep.rel_iv == rep.type_iv / res.learned_true_risk
    loss = SIMPLE.shifted()
    res = learn_on_selected(res, res.independent_sample, loss, P)
    rep = estimation_errors(res, P, loss, relative=True)
    assert 0 <= rep.rel_ii < 1 and 0 <= rep.rel_iii < 1 and 0 <= rep.rel_iv < 1
    realizable = JointDistribution.deterministic((0, 1))
    res = learn_on_selected(select_from_risks(fam, {"00": 1, "01": 0}), Sample(2, ((0, 0), (1, 1))), SIMPLE, realizable)
    with pytest.raises(ValueError):
        estimation_errors(res, realizable, relative=True)
    assert estimation_errors(res, realizable).rel_ii is None


def test_result_serializes():
    P = JointDistribution.uniform(2)
    res = _pipeline(P, build_family(2), 10, 5, 0)
    data = json.loads(res.to_json())
    assert data["representative"] == res.representative
    assert set(data["estimated_risks"]) == {"00", "01"}
