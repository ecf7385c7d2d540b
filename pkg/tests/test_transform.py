import random
from fractions import Fraction

import pytest

from extfair import (
    Allocation,
    BuiltinId,
    Instance2D,
    Kind,
    builtin,
    check_shift_consistency,
    enumerate_allocations,
    transform,
    verify_lemma1,
)
from extfair.generate import random_instance
from extfair.transform import TransformResult


def test_intro_values():
    res = transform(builtin(BuiltinId.INTRO_2GOODS))
    assert res.one_d.w[0] == (7, 105)
    assert res.one_d.w[1] == (105, 7)
    assert res.shift == (-101, -101)


def test_no_externality_is_identity():
    inst = Instance2D([[3, 1], [2, 2]], [[0, 0], [0, 0]])
    res = transform(inst)
    assert res.one_d.w == inst.v
    assert res.shift == (0, 0)


def test_chores_example():
    res = transform(builtin(BuiltinId.EXAMPLE_CHORES_NEG))
    assert res.one_d.w[0] == (-4, -40, -38)
    assert res.shift[0] == -177


def test_item_ids_carried():
    inst = builtin(BuiltinId.EXAMPLE2_PROPXE)
    assert transform(inst).one_d.item_ids == inst.item_ids


@pytest.mark.parametrize("which,kind", [(BuiltinId.VG_GOODS, Kind.GOODS), (BuiltinId.VG_APPENDIX, Kind.GOODS),
                                        (BuiltinId.VC_CHORES, Kind.CHORES)])
def test_sign_preservation_on_table_profiles(which, kind):
    rep = verify_lemma1(transform(builtin(which)), kind)
    assert rep.ok and rep.witness is None


def test_sign_preservation_violation_has_witness():
    inst = Instance2D([[5, 1]], [[0, 2]])
    rep = verify_lemma1(transform(inst), Kind.GOODS)
    assert not rep.monotone and rep.witness == (0, 1)


def test_sign_preservation_chores_sign():
    inst = Instance2D([[-1, 1]], [[0, 0]])
    rep = verify_lemma1(transform(inst), Kind.CHORES)
    assert not rep.sign_ok and rep.witness == (0, 1)


def test_sign_preservation_no_items():
    inst = Instance2D([[]], [[]])
    assert verify_lemma1(transform(inst), Kind.GOODS).ok


def test_sign_preservation_rejects_mixed():
    with pytest.raises(ValueError):
        verify_lemma1(transform(Instance2D([[1]], [[0]])), Kind.MIXED)


def test_shift_consistency_random_sample():
    inst = random_instance(8, 3, 6, "mixed", "mixed", max_den=7)
    rng = random.Random(1)
    sample = [Allocation([rng.randrange(3) for _ in range(6)]) for _ in range(100)]
    assert check_shift_consistency(inst, sample)


def test_shift_consistency_single_agent():
    inst = Instance2D([[1, 2, 3]], [[-4, 5, 0]])
    assert check_shift_consistency(inst, [Allocation([0, 0, 0])])


def test_corrupted_shift_detected():
    inst = random_instance(2, 2, 3, "goods", "positive")
    good = transform(inst)
    bad = TransformResult(good.one_d, (good.shift[0] + 1, good.shift[1]))
    assert not check_shift_consistency(inst, enumerate_allocations(2, 3), bad)


def test_exact_with_small_epsilons():
    e = Fraction(1, 10**9)
    inst = Instance2D([[1 - e, 2 * e]], [[-e, -1 + 2 * e]])
    assert transform(inst).one_d.w == ((1, 1),)
