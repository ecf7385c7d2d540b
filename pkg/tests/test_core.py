from fractions import Fraction

import numpy as np
import pytest

from extfair import (
    Allocation,
    BuiltinId,
    Externality,
    FullInstance,
    Instance1D,
    Instance2D,
    ItemClass,
    Kind,
    as_rational,
    builtin,
    classify,
    enumerate_allocations,
    transform,
    utility_1d,
    utility_2d,
    utility_full,
)
from extfair.core import (
    BadRational,
    InvalidAllocation,
    InvalidInstance,
    TooLarge,
    allocation_at,
    allocation_count,
    allocation_index,
    assignment_block,
    map_blocks,
)
from extfair.generate import random_instance

from oracles import utility_full_loops, value_of_bundle

F = Fraction


class TestRationals:
    @pytest.mark.parametrize("text,want", [
        ("-40", F(-40)), ("3/1000", F(3, 1000)), ("0.0001", F(1, 10**4)), ("6/4", F(3, 2)),
        ("1e-3", F(1, 1000)), (" 7 ", F(7)), (5, F(5)), (F(2, 3), F(2, 3)),
    ])
    def test_parses_exactly(self, text, want):
        got = as_rational(text)
        assert got == want and isinstance(got, Fraction)

    @pytest.mark.parametrize("bad", [0.1, True, "1/0", "abc", "1/2/3", None, [1]])
    def test_rejects(self, bad):
        with pytest.raises(BadRational):
            as_rational(bad)

    def test_lowest_terms(self):
        q = as_rational("10/4")
        assert (q.numerator, q.denominator) == (5, 2)


class TestInstances:
    def test_ragged_rejected(self):
        with pytest.raises(InvalidInstance):
            Instance2D([[1, 2], [3]], [[0, 0], [0]])

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InvalidInstance):
            Instance2D([[1, 2]], [[0, 0], [0, 0]])

    def test_item_ids_length(self):
        with pytest.raises(InvalidInstance):
            Instance1D([[1, 2]], ("a",))

    def test_no_agents(self):
        with pytest.raises(InvalidInstance):
            Instance1D([])

    def test_full_tensor_shape(self):
        with pytest.raises(InvalidInstance):
            FullInstance([[[1, 2]], [[1, 2]]])

    def test_w_is_difference(self):
        inst = Instance2D([[6, 5]], [[-1, -100]])
        assert inst.w == ((7, 105),)

    def test_frozen_and_hashable(self):
        inst = builtin(BuiltinId.INTRO_2GOODS)
        assert inst == builtin(BuiltinId.INTRO_2GOODS)
        assert hash(inst) == hash(builtin(BuiltinId.INTRO_2GOODS))


class TestAllocation:
    def test_bundles_and_masks(self):
        a = Allocation([2, 0, 2, 1])
        assert a.bundles(3) == [frozenset({1}), frozenset({3}), frozenset({0, 2})]
        assert a.masks(3) == [0b0010, 0b1000, 0b0101]

    def test_from_bundles_round_trip(self):
        a = Allocation.from_bundles([[1], [3], [0, 2]], 4)
        assert a == Allocation([2, 0, 2, 1])

    def test_from_bundles_overlap(self):
        with pytest.raises(InvalidAllocation):
            Allocation.from_bundles([[0, 1], [1]], 2)

    def test_from_bundles_incomplete(self):
        with pytest.raises(InvalidAllocation):
            Allocation.from_bundles([[0], []], 2)

    @pytest.mark.parametrize("assignment,n,m", [([0, 3], 3, 2), ([0], 2, 2), ([-1, 0], 2, 2)])
    def test_validate(self, assignment, n, m):
        with pytest.raises(InvalidAllocation):
            Allocation(assignment).validate(n, m)


class TestUtilities:
    def test_empty_bundle_is_total_externality(self):
        inst = builtin(BuiltinId.EXAMPLE2_PROPXE)
        a = Allocation([1] * 6)
        assert utility_2d(inst, 0, a) == sum(inst.vprime[0])

    def test_intro_value(self):
        inst = builtin(BuiltinId.INTRO_2GOODS)
        assert utility_2d(inst, 0, Allocation([0, 1])) == -94

    def test_propx_e_instance_value(self):
        inst = builtin(BuiltinId.EXAMPLE2_PROPXE)
        assert utility_2d(inst, 0, Allocation([0, 0, 0, 0, 0, 1])) == -16

    def test_one_d_values(self):
        one = transform(builtin(BuiltinId.INTRO_2GOODS)).one_d
        assert utility_1d(one, 0, Allocation([1, 1])) == 0
        assert utility_1d(one, 0, Allocation([0, 1])) == 7
        assert utility_1d(one, 0, Allocation([0, 0])) == 112

    def test_full_single_agent(self):
        inst = FullInstance([[[1, 2, 3]]])
        assert utility_full(inst, 0, Allocation([0, 0, 0])) == 6

    def test_full_embedding_matches_2d(self):
        inst = random_instance(3, 3, 4, "mixed", "mixed", max_den=3)
        full = FullInstance.embed(inst)
        for a in enumerate_allocations(3, 4):
            for i in range(3):
                assert utility_full(full, i, a) == utility_2d(inst, i, a)

    def test_full_matches_triple_loop(self):
        import random

        rng = random.Random(5)
        tensor = [[[F(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(4)] for _ in range(3)] for _ in range(3)]
        inst = FullInstance(tensor)
        a = Allocation([2, 0, 1, 1])
        for i in range(3):
            assert utility_full(inst, i, a) == utility_full_loops(tensor, i, a.assignment)

    def test_2d_matches_oracle(self):
        inst = random_instance(11, 3, 5, "goods", "mixed", max_den=5)
        for a in list(enumerate_allocations(3, 5))[::7]:
            for i in range(3):
                assert utility_2d(inst, i, a) == value_of_bundle(inst, i, a.bundle(i))


class TestClassify:
    def test_goods_inverse(self):
        c = classify(builtin(BuiltinId.VG_GOODS))
        assert (c.kind, c.externality, c.correlated, c.inverse) == (Kind.GOODS, Externality.NEGATIVE, False, True)

    def test_chores_correlated(self):
        c = classify(builtin(BuiltinId.EXAMPLE_CHORES_NEG))
        assert (c.kind, c.externality, c.correlated) == (Kind.CHORES, Externality.NEGATIVE, True)

    def test_all_zero(self):
        c = classify(Instance2D([[0, 0]], [[0, 0]]))
        assert c.kind is Kind.GOODS
        assert all(x is ItemClass.NEUTRAL for row in c.per_item for x in row)

    def test_mixed(self):
        c = classify(Instance2D([[1, -1]], [[0, 0]]))
        assert c.kind is Kind.MIXED and c.correlated is None


class TestEnumeration:
    def test_single_agent(self):
        assert list(enumerate_allocations(1, 3)) == [Allocation([0, 0, 0])]

    def test_order(self):
        got = [a.assignment for a in enumerate_allocations(2, 2)]
        assert got == [(0, 0), (1, 0), (0, 1), (1, 1)]

    def test_no_items(self):
        assert list(enumerate_allocations(3, 0)) == [Allocation([])]

    def test_range(self):
        full = list(enumerate_allocations(3, 3))
        assert list(enumerate_allocations(3, 3, 5, 11)) == full[5:11]

    def test_index_round_trip(self):
        for idx, a in enumerate(enumerate_allocations(3, 4)):
            assert allocation_index(a, 3) == idx
            assert allocation_at(3, 4, idx) == a

    def test_full_table_size_and_distinct(self):
        rows = np.concatenate(map_blocks(lambda lo, a: a, 3, 12))
        assert rows.shape == (3**12, 12)
        codes = (rows.astype(np.int64) * (3 ** np.arange(12))).sum(axis=1)
        assert np.array_equal(codes, np.arange(3**12))

    def test_block_matches_stream(self):
        block = assignment_block(3, 4, 10, 30)
        stream = list(enumerate_allocations(3, 4, 10, 30))
        assert [tuple(r) for r in block.tolist()] == [a.assignment for a in stream]

    def test_threads_same_result(self):
        one = map_blocks(lambda lo, a: int(a.sum()), 3, 12, threads=1, rows=4096)
        four = map_blocks(lambda lo, a: int(a.sum()), 3, 12, threads=4, rows=4096)
        assert one == four

    def test_guard(self):
        with pytest.raises(TooLarge):
            allocation_count(2, 49)
        assert allocation_count(2, 48) == 2**48
