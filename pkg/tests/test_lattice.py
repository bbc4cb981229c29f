import itertools

import pytest

from oracles import bell_triangle, block_constant_tables
from vcselect.core import Hypothesis, LossSpec, all_hypotheses
from vcselect.lattice import (
    CandidateFamily,
    Partition,
    PartitionModel,
    build_family,
    enumerate_partitions,
    explicit_family,
    maximal_by_scan,
    refinement_leq,
    shatter_bruteforce,
    vc_dim_analytic,
)

SIMPLE = LossSpec.simple()


def test_partition_string_roundtrip_and_validation():
    p = Partition.from_string("0102")
    assert str(p) == "0102" and p.n_blocks == 3 and p.blocks == ((0, 2), (1,), (3,))
    with pytest.raises(ValueError):
        Partition((1, 0))
    with pytest.raises(ValueError):
        Partition((0, 2))
    assert Partition.from_blocks([[2, 3], [0, 1]]) == Partition.from_string("0011")


def test_enumeration_small_cases():
    assert [str(p) for p in enumerate_partitions(1)] == ["0"]
    assert len(enumerate_partitions(4)) == 15
    assert [str(p) for p in enumerate_partitions(3)] == ["000", "001", "010", "011", "012"]


@pytest.mark.parametrize("n", range(1, 9))
def test_enumeration_counts_are_bell_numbers(n):
    parts = enumerate_partitions(n)
    assert len(parts) == bell_triangle(n)[-1]
    assert len(set(parts)) == len(parts)
    assert list(parts) == sorted(parts)


def test_enumeration_guard():
    with pytest.raises(ValueError):
        enumerate_partitions(0)
    with pytest.raises(ValueError):
        enumerate_partitions(13)


def test_refinement_examples():
    one = Partition.coarsest(4)
    fine = Partition.finest(4)
    for p in enumerate_partitions(4):
        assert refinement_leq(one, p)
        assert refinement_leq(p, fine)
    a = Partition.from_blocks([[0, 1], [2, 3]])
    b = Partition.from_blocks([[0, 2], [1, 3]])
    assert not refinement_leq(a, b) and not refinement_leq(b, a)
    with pytest.raises(ValueError):
        refinement_leq(Partition.coarsest(2), Partition.coarsest(3))


@pytest.mark.parametrize("n", range(1, 6))
def test_refinement_is_a_partial_order(n):
    parts = enumerate_partitions(n)
    leq = {(a, b): refinement_leq(a, b) for a in parts for b in parts}
    for a in parts:
        assert leq[a, a]
    for a, b in itertools.product(parts, repeat=2):
        if a != b:
            assert not (leq[a, b] and leq[b, a])
    for a, b, c in itertools.product(parts, repeat=3):
        if leq[a, b] and leq[b, c]:
            assert leq[a, c]


@pytest.mark.parametrize("n", range(1, 5))
def test_refinement_implies_model_containment(n):
    parts = enumerate_partitions(n)
    members = {p: set(block_constant_tables(p.rgs)) for p in parts}
    for a, b in itertools.product(parts, repeat=2):
        if refinement_leq(a, b):
            assert members[a] <= members[b]


@pytest.mark.parametrize("rgs", ["0", "01", "0011", "0120", "0123"])
def test_partition_model_members(rgs):
    model = PartitionModel(Partition.from_string(rgs))
    tables = sorted(h.table for h in model)
    assert tables == sorted(block_constant_tables(model.partition.rgs))
    assert len(model) == 2 ** model.partition.n_blocks
    assert all(h in model for h in model)
    assert Hypothesis((0, 1, 0, 0)) not in PartitionModel(Partition.from_string("0000"))


def test_analytic_vc_dims():
    assert vc_dim_analytic(PartitionModel(Partition.coarsest(5))) == 1
    assert vc_dim_analytic(PartitionModel(Partition.finest(4))) == 4
    for n in range(2, 7):
        assert vc_dim_analytic(PartitionModel(Partition((0,) * (n - 1) + (1,)))) == 2


def test_shatter_examples():
    m = PartitionModel(Partition.from_string("001"))
    assert shatter_bruteforce(m, SIMPLE, 2)[1] == 2
    assert shatter_bruteforce([Hypothesis((0, 1))], SIMPLE, 3) == (1, 0)
    assert shatter_bruteforce(all_hypotheses(3), SIMPLE, 3) == (8, 3)


@pytest.mark.parametrize("n", range(1, 5))
def test_shatter_vc_matches_block_count(n):
    for p in enumerate_partitions(n):
        m = PartitionModel(p)
        S, d = shatter_bruteforce(m, SIMPLE, min(8, 2 * n))
        assert d == p.n_blocks
        assert S == 2 ** p.n_blocks


def test_shatter_guards():
    with pytest.raises(ValueError):
        shatter_bruteforce(all_hypotheses(11), SIMPLE, 2)
    with pytest.raises(ValueError):
        shatter_bruteforce(all_hypotheses(2), SIMPLE, 9)
    with pytest.raises(ValueError):
        shatter_bruteforce(all_hypotheses(2), LossSpec.bounded(lambda x, y, p: 0.5, 1), 2)


def test_shatter_growth_on_small_model_by_tuples():
    # S(G, N) over N-tuples equals the max over distinct-atom subsets
    model = list(PartitionModel(Partition.from_string("01")))
    atoms = [(0, 0), (0, 1), (1, 0), (1, 1)]
    for N in (1, 2, 3):
        best = max(
            len({tuple(int(h(x) != y) for x, y in pts) for h in model}) for pts in itertools.product(atoms, repeat=N)
        )
        assert shatter_bruteforce(model, SIMPLE, N)[0] == best


def test_two_block_family_constants():
    fam = build_family(4, "two-block")
    assert fam.maximal_count == 7
    assert fam.d_vc == 2
    assert len(fam.models) == 8


@pytest.mark.parametrize("n", range(1, 6))
def test_all_partitions_family_has_one_maximal_model(n):
    fam = build_family(n, "all-partitions")
    assert fam.maximal_count == 1
    assert maximal_by_scan(fam) == fam.maximal_keys == (str(Partition.finest(n)),)
    assert fam.d_vc == n


@pytest.mark.parametrize("n", range(1, 5))
def test_families_cover_the_space(n):
    every = set(all_hypotheses(n))
    for kind in ("all-partitions", "two-block"):
        assert build_family(n, kind).union() == every


def test_family_description_and_guard():
    fam = build_family(3, "two-block")
    assert fam.describe() == {"kind": "two-block", "n": 3, "model_count": 4, "d_vc": 2, "maximal_count": 3}
    with pytest.raises(ValueError):
        build_family(3, "three-block")
    with pytest.raises(ValueError):
        build_family(13, "all-partitions")


def test_explicit_family_maximal_scan():
    h = all_hypotheses(2)
    fam = explicit_family([("a", h[:2], 1), ("b", h, 2), ("c", h[2:], 1)])
    assert fam.maximal_keys == ("b",)
    assert fam.d_vc == 2
    with pytest.raises(ValueError):
        CandidateFamily(())
