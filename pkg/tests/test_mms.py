from fractions import Fraction

import pytest

from extfair import (
    Allocation,
    BuiltinId,
    Instance1D,
    Instance2D,
    best_alpha,
    builtin,
    check,
    enumerate_allocations,
    mms_decompose,
    mms_profile,
    mms_share,
    transform,
    verify_shift_identity,
)
from extfair.checkers import Notion, Tag
from extfair.core import Unsupported, WrongSpace
from extfair.generate import random_instance
from extfair.mms import supporting_allocation

import oracles

F = Fraction


class TestShares:
    def test_goods_counterexample(self):
        inst = builtin(BuiltinId.PROP_PROOF_GOODS)
        assert mms_share(inst, 0, "W").mu == 1
        assert mms_share(inst, 0, "V").mu == F(8, 5)

    def test_negative_externality_chores(self):
        inst = builtin(BuiltinId.EXAMPLE_CHORES_NEG)
        assert mms_share(inst, 0, "W").mu == -42
        assert mms_share(inst, 0, "V").mu == -219

    def test_single_agent(self):
        inst = Instance2D([[3, -1]], [[5, 7]])
        assert mms_share(inst, 0, "V").mu == 2

    def test_partition_attains_share(self):
        inst = random_instance(4, 3, 5, "mixed", "mixed", max_den=3)
        for i in range(3):
            s = mms_share(inst, i, "V")
            worst = min(oracles.value_of_bundle(inst, i, s.partition.bundle(j)) for j in range(3))
            assert worst == s.mu
            assert oracles.value_of_bundle(inst, i, s.partition.bundle(s.min_bundle)) == s.mu

    def test_bad_agent(self):
        with pytest.raises(ValueError):
            mms_share(Instance1D([[1]]), 3, "W")

    def test_threads_agree(self):
        inst = builtin(BuiltinId.VG_GOODS)
        assert mms_share(inst, 1, "V", threads=4) == mms_share(inst, 1, "V")

    @pytest.mark.parametrize("seed", range(200))
    def test_shift_identity_random(self, seed):
        import random

        rng = random.Random(seed)
        m = rng.randint(0, 8)
        kind = ("goods", "chores", "mixed")[seed % 3]
        inst = random_instance(rng, 2, m, kind, "mixed", max_den=rng.choice((1, 3)))
        prof = mms_profile(inst)
        assert verify_shift_identity(inst, prof)
        if seed % 10 == 0:
            one = transform(inst).one_d
            for i in range(2):
                assert prof.agents[i].mu_v == oracles.maximin_share(inst, i)
                assert prof.agents[i].mu_w == oracles.maximin_share(one, i)

    def test_identity_without_externality(self):
        inst = Instance2D([[3, 1, 2], [1, 1, 4]], [[0, 0, 0], [0, 0, 0]])
        prof = mms_profile(inst)
        assert prof.mu("V") == prof.mu("W")


class TestDecomposition:
    def test_no_externality(self):
        inst = Instance2D([[3, 1, 2], [1, 1, 4]], [[0, 0, 0], [0, 0, 0]])
        prof = mms_profile(inst)
        for i, a in enumerate(prof.agents):
            assert (a.mu_plus, a.mu_minus) == (a.mu_v, 0)

    def test_propx_e_instance_parts_sum_to_share(self):
        inst = builtin(BuiltinId.EXAMPLE2_PROPXE)
        prof = mms_profile(inst)
        plus, minus = mms_decompose(inst, 0, prof)
        assert plus + minus == prof.agents[0].mu_v
        # chores: mu+ is the externality from the items outside the share bundle
        bundle = prof.agents[0].partition.bundle(prof.agents[0].min_bundle)
        assert minus == sum(inst.v[0][k] for k in bundle)
        assert plus == sum(inst.vprime[0][k] for k in range(inst.m) if k not in bundle)

    def test_mixed_unsupported(self):
        inst = Instance2D([[1, -1]], [[0, 0]])
        prof = mms_profile(inst)
        assert prof.agents[0].mu_plus is None
        with pytest.raises(Unsupported):
            mms_decompose(inst, 0, prof)


def alpha_oracle(inst, mus):
    """Best alpha in [0, 1] for plain alpha-MMS in V, from raw utilities."""
    best = None
    open_at_zero = any(mu < 0 for mu in mus)
    for a in oracles.all_assignments(inst.n, inst.m):
        upper = F(1)
        for i, mu in enumerate(mus):
            u = oracles.value_of_bundle(inst, i, a.bundle(i))
            if u >= 0:
                bound = u / mu if mu > 0 else F(1)
            elif mu >= 0:
                bound = None
            else:
                bound = mu / u
            if bound is None:
                upper = None
                break
            upper = min(upper, bound)
        if upper is None or (open_at_zero and upper == 0):
            continue
        best = upper if best is None else max(best, upper)
    return best


class TestBestAlpha:
    @pytest.mark.parametrize("seed", range(30))
    def test_matches_oracle(self, seed):
        kind = ("goods", "chores")[seed % 2]
        ext = ("positive", "negative", "mixed")[seed % 3]
        inst = random_instance(seed, 2 + seed % 2, 4, kind, ext, max_den=2)
        prof = mms_profile(inst)
        res = best_alpha(inst, prof, Tag.ALPHA_MMS)
        want = alpha_oracle(inst, prof.mu("V"))
        if want is None:
            assert res.status == "NONE"
        else:
            assert res.alpha == want
            assert res.status == ("ALL" if want == 1 else "VALUE")
            assert check(Notion(Tag.ALPHA_MMS, res.alpha), "V", inst, res.witness, prof).holds

    def test_all_without_externality(self):
        inst = Instance2D([[2, 2, 1, 1], [2, 2, 1, 1]], [[0] * 4, [0] * 4])
        res = best_alpha(inst, mms_profile(inst), Tag.ALPHA_MMS)
        assert res.status == "ALL" and res.alpha == 1

    def test_goods_table_none(self):
        inst = builtin(BuiltinId.VG_GOODS)
        assert best_alpha(inst, mms_profile(inst)).status == "NONE"

    def test_chores_table_value(self):
        inst = builtin(BuiltinId.VC_CHORES)
        res = best_alpha(inst, mms_profile(inst))
        assert res.status == "VALUE" and res.alpha == F(1, 11)

    def test_witness_supported_and_nothing_above(self):
        inst = random_instance(7, 3, 5, "chores", "negative", max_den=2)
        prof = mms_profile(inst)
        res = best_alpha(inst, prof, Tag.ALPHA_MMS)
        assert res.status in ("VALUE", "ALL")
        if res.status == "VALUE":
            assert supporting_allocation(inst, prof, Tag.ALPHA_MMS, res.alpha) is not None
            assert supporting_allocation(inst, prof, Tag.ALPHA_MMS, res.alpha + F(1, 10**9)) is None

    @pytest.mark.parametrize("seed", range(8))
    def test_shifted_in_w_equals_plain(self, seed):
        inst = random_instance(seed, 2, 4, "goods", "mixed")
        one = transform(inst).one_d
        p1 = mms_profile(one)
        a = best_alpha(one, p1, Tag.ALPHA_MMS, "W")
        b = best_alpha(inst, mms_profile(inst), Tag.SHIFTED_ALPHA_MMS, "V")
        # shifted alpha-MMS in V is plain alpha-MMS on the transformed values
        assert (a.status, a.alpha) == (b.status, b.alpha)

    def test_variant_one(self):
        inst = random_instance(3, 2, 4, "goods", "negative")
        prof = mms_profile(inst)
        res = best_alpha(inst, prof, Tag.ALPHA_MMS_I)
        if res.witness is not None:
            assert check(Notion(Tag.ALPHA_MMS_I, res.alpha), "V", inst, res.witness, prof).holds

    def test_variant_two_brackets(self):
        # no MMS allocation exists here, so alpha = 1 fails while small alphas succeed
        inst = builtin(BuiltinId.VG_GOODS)
        prof = mms_profile(inst)
        res = best_alpha(inst, prof, Tag.ALPHA_MMS_II)
        assert res.status == "VALUE" and not res.exact
        assert 0 < res.upper - res.alpha <= F(1, 2**40)
        assert check(Notion(Tag.ALPHA_MMS_II, res.alpha), "V", inst, res.witness, prof).holds
        assert supporting_allocation(inst, prof, Tag.ALPHA_MMS_II, res.upper) is None

    def test_variant_two_all_when_mms_exists(self):
        inst = Instance2D.identical(2, [(5, -1), (4, -1), (3, -2), (3, -1)])
        res = best_alpha(inst, mms_profile(inst), Tag.ALPHA_MMS_II)
        assert res.status == "ALL" and res.alpha == 1

    def test_variant_two_chores_negative_unsupported(self):
        inst = builtin(BuiltinId.EXAMPLE_CHORES_NEG)
        with pytest.raises(Unsupported):
            best_alpha(inst, mms_profile(inst), Tag.ALPHA_MMS_II)

    def test_variants_need_v(self):
        inst = builtin(BuiltinId.PROP_PROOF_GOODS)
        with pytest.raises(WrongSpace):
            best_alpha(inst, mms_profile(inst), Tag.ALPHA_MMS_I, "W")

    def test_mixed_unsupported(self):
        inst = Instance2D([[1, -1], [1, -1]], [[0, 0], [0, 0]])
        with pytest.raises(Unsupported):
            best_alpha(inst, mms_profile(inst))

    def test_zero_share_reported(self):
        inst = Instance2D([[1, 0], [1, 0]], [[0, 0], [0, 0]])
        res = best_alpha(inst, mms_profile(inst))
        assert res.zero_mu == (0, 1)
