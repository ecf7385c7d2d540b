"""Reference instances and a suite of claims about them, each checked by brute force.

Every claim pairs an expected outcome with what the exhaustive solvers
compute. A mismatch is a FAIL, except on claims marked fragile (constructions
whose stated numbers are known to be delicate), where it is reported as a
DISCREPANCY together with the computed evidence. A claim whose own evidence
does not re-check is always a FAIL.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .allocators import exhaustive_opt, search_predicate
from .checkers import (
    Notion,
    Tag,
    check,
    check_envy,
    check_eq,
    check_mms_family,
    check_prop,
    check_prop_e,
    check_average_share,
    search_fullext_gap,
)
from .core import (
    Allocation,
    Externality,
    FullInstance,
    Instance1D,
    Kind,
    allocation_at,
    allocation_index,
    classify,
    enumerate_allocations,
    utility_2d,
)
from .generate import random_instance
from .instances import BuiltinId, builtin
from .mms import AgentShare, MmsProfile, best_alpha, mms_profile, supporting_allocation, verify_shift_identity
from .scan import Objective, optimal_indices, optimum
from .transform import transform, verify_lemma1
from .views import view_of

F = Fraction

__all__ = ["BuiltinId", "ClaimResult", "CLAIMS", "builtin", "run_suite", "claim_ids"]


@dataclass
class ClaimResult:
    claim_id: str
    title: str
    expected: str
    computed: str
    status: str  # PASS, FAIL or DISCREPANCY
    evidence: dict = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {
            "claim": self.claim_id,
            "title": self.title,
            "expected": self.expected,
            "computed": self.computed,
            "status": self.status,
            "evidence": {k: _text(v) for k, v in self.evidence.items()},
        }

    def line(self) -> str:
        return f"{self.status:<11} {self.claim_id:<22} expected: {self.expected} | computed: {self.computed}"


def _text(x):
    if isinstance(x, (list, tuple)):
        return [_text(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _text(v) for k, v in x.items()}
    if isinstance(x, (bool, int)) or x is None:
        return x
    return str(x)


def _bundles(alloc: Allocation, inst) -> str:
    parts = []
    for b in alloc.bundles(inst.n):
        parts.append("(" + ",".join(inst.item_ids[k] for k in sorted(b)) + ")" if b else "()")
    return "{" + ", ".join(parts) + "}"


class _Claim:
    def __init__(self, claim_id: str, title: str, fragile: bool, fn: Callable):
        self.claim_id, self.title, self.fragile, self.fn = claim_id, title, fragile, fn

    def run(self) -> ClaimResult:
        expected, computed, matches, consistent, evidence = self.fn()
        if not consistent:
            status = "FAIL"
        elif matches:
            status = "PASS"
        else:
            status = "DISCREPANCY" if self.fragile else "FAIL"
        return ClaimResult(self.claim_id, self.title, expected, computed, status, evidence)


CLAIMS: dict[str, _Claim] = {}


def _claim(claim_id: str, title: str, fragile: bool = False):
    def deco(fn):
        CLAIMS[claim_id] = _Claim(claim_id, title, fragile, fn)
        return fn

    return deco


def claim_ids() -> list[str]:
    return list(CLAIMS)


# --------------------------------------------------------------------------- claims


@_claim("transform-intro", "transformed values of the two-goods agent")
def _transform_intro():
    inst = builtin(BuiltinId.INTRO_2GOODS)
    res = transform(inst)
    w = tuple(res.one_d.w[0])
    ok = w == (7, 105)
    consistent = all(
        utility_2d(inst, i, a) == sum((res.one_d.w[i][k] for k in a.bundle(i)), F(0)) + res.shift[i]
        for a in enumerate_allocations(inst.n, inst.m) for i in range(inst.n)
    )
    return "w_1 = (7, 105)", f"w_1 = ({w[0]}, {w[1]})", ok, consistent, {"shift": res.shift}


@_claim("intro-ef", "envy-free without externalities, not with them")
def _intro_ef():
    inst = builtin(BuiltinId.INTRO_2GOODS)
    plain = Instance1D(inst.v, inst.item_ids)
    alloc = Allocation([0, 1])
    ef_plain = check_envy("W", plain, alloc, Tag.EF)
    ef_ext = check_envy("V", inst, alloc, Tag.EF)
    wit = ef_ext.witness or {}
    ok = ef_plain.holds and not ef_ext.holds and (wit.get("agent"), wit.get("other")) == (0, 1)
    consistent = ef_ext.holds or wit["lhs"] < wit["rhs"]
    return ("EF without externalities; not EF with them, agent 1 envies agent 2",
            f"EF plain={ef_plain.holds}, EF with externalities={ef_ext.holds}",
            ok, consistent, {"witness": wit})


@_claim("intro-prop", "swapped goods: envy-free with externalities but below 1/n of the grand bundle")
def _intro_prop():
    inst = builtin(BuiltinId.INTRO_2GOODS)
    alloc = Allocation([1, 0])
    ef = check_envy("V", inst, alloc, Tag.EF)
    short = [i for i in range(inst.n)
             if inst.n * utility_2d(inst, i, alloc) < utility_2d(inst, i, Allocation([i, i]))]
    plain = check_prop(Instance1D(inst.v, inst.item_ids), alloc)
    u1, total = utility_2d(inst, 0, alloc), utility_2d(inst, 0, Allocation([0, 0]))
    ok = ef.holds and 0 in short and not plain.holds
    return ("EF, not PROP", f"EF={ef.holds}, below 1/n share: agents {[i + 1 for i in short]}",
            ok, True, {"u_1": u1, "u_1(M)/2": total / 2, "prop_plain_witness": plain.witness})


@_claim("example1-v", "leximin on raw utilities is {(), (), (c1..c4)} and not PROP1-E")
def _example1_v():
    inst = builtin(BuiltinId.EXAMPLE1_LEXIMIN)
    lex = exhaustive_opt(inst, "leximin", "V")
    v = check_prop_e("V", inst, lex, Tag.PROP1_E)
    ok = lex == Allocation([2, 2, 2, 2]) and not v.holds and v.witness["agent"] == 2
    consistent = check(Tag.LEXIMIN_OPT, "V", inst, lex).holds
    return ("{(), (), (c1,c2,c3,c4)}, not PROP1-E (agent 3)",
            f"{_bundles(lex, inst)}, PROP1-E={v.holds}", ok, consistent, {"witness": v.witness})


@_claim("example1-w", "leximin on transformed values is PROP1-E and PO with externalities")
def _example1_w():
    inst = builtin(BuiltinId.EXAMPLE1_LEXIMIN)
    one_d = transform(inst).one_d
    view = view_of(inst, "W")
    ties = optimal_indices(view, Objective.LEXIMIN)
    quoted = Allocation([2, 1, 0, 1])
    lex = exhaustive_opt(inst, "leximin", "W")
    verdicts = {
        "prop1-e V": check_prop_e("V", inst, lex, Tag.PROP1_E).holds,
        "po V": check(Tag.PO, "V", inst, lex).holds,
        "prop1 W": check_prop_e("W", one_d, lex, Tag.PROP1_E).holds,
        "po W": check(Tag.PO, "W", one_d, lex).holds,
        "quoted prop1-e V": check_prop_e("V", inst, quoted, Tag.PROP1_E).holds,
        "quoted po V": check(Tag.PO, "V", inst, quoted).holds,
    }
    in_ties = allocation_index(quoted, inst.n) in ties
    sorted_w = sorted(view.rational(view.value(i, m)) for i, m in enumerate(lex.masks(inst.n)))
    ok = in_ties and all(verdicts.values())
    return ("{c3,(c2,c4),c1} is leximin in W; PROP1-E and PO in V",
            f"{_bundles(lex, inst)} of {len(ties)} tied; sorted w = {tuple(str(x) for x in sorted_w)}",
            ok, True, {"verdicts": verdicts, "quoted_in_tie_set": in_ties, "tie_set_size": len(ties)})


@_claim("example2", "PROPX-E allocation that is not 2-MMS with externalities, but is without")
def _example2():
    inst = builtin(BuiltinId.EXAMPLE2_PROPXE)
    prof = mms_profile(inst)
    alloc = Allocation([0, 0, 0, 0, 0, 1])
    half = Notion(Tag.ALPHA_MMS, F(1, 2))
    px = check_prop_e("V", inst, alloc, Tag.PROPX_E)
    v = check_mms_family("V", inst, alloc, half, prof)
    w = check_mms_family("W", transform(inst).one_d, alloc, half, mms_profile(transform(inst).one_d))
    mus = (prof.agents[0].mu_w, prof.agents[0].mu_v)
    ok = px.holds and not v.holds and w.holds and mus == (-49, -6)
    consistent = verify_shift_identity(inst, prof)
    return ("PROPX-E; not 2-MMS in V; 2-MMS in W; mu_W=-49, mu_V=-6",
            f"PROPX-E={px.holds}, 2-MMS V={v.holds}, W={w.holds}; mu_W={mus[0]}, mu_V={mus[1]}",
            ok, consistent, {"v_witness": v.witness})


@_claim("mms-goods-counterex", "half-MMS with externalities but not on transformed values (goods)")
def _goods_counterex():
    inst = builtin(BuiltinId.PROP_PROOF_GOODS)
    prof = mms_profile(inst)
    alloc = Allocation([0, 1, 1, 1, 1, 1])
    half = Notion(Tag.ALPHA_MMS, F(1, 2))
    v = check_mms_family("V", inst, alloc, half, prof)
    w = check_mms_family("W", inst, alloc, half, prof)
    mus = (prof.agents[0].mu_w, prof.agents[0].mu_v)
    ok = v.holds and not w.holds and mus == (1, F(8, 5))
    return ("mu_W=1, mu_V=8/5; 1/2-MMS in V, not in W",
            f"mu_W={mus[0]}, mu_V={mus[1]}; V={v.holds}, W={w.holds}",
            ok, verify_shift_identity(inst, prof), {"w_witness": w.witness})


@_claim("example5", "4/3-MMS with externalities but not on transformed values (chores)")
def _example5():
    inst = builtin(BuiltinId.EXAMPLE_CHORES_NEG)
    prof = mms_profile(inst)
    alloc = Allocation([0, 0, 0])
    a = Notion(Tag.ALPHA_MMS, F(3, 4))
    v = check_mms_family("V", inst, alloc, a, prof)
    w = check_mms_family("W", inst, alloc, a, prof)
    ag = prof.agents[0]
    ok = (ag.mu_w, ag.mu_v, ag.shift) == (-42, -219, -177) and v.holds and not w.holds
    ok = ok and w.witness["rhs"] == -56 and ag.mu_v / a.alpha == -292
    return ("mu_W=-42, mu_V=-219, v'(M)=-177; holds in V (>= -292), fails in W (>= -56)",
            f"mu_W={ag.mu_w}, mu_V={ag.mu_v}, v'(M)={ag.shift}; V={v.holds}, W={w.holds}",
            ok, verify_shift_identity(inst, prof),
            {"u_1": utility_2d(inst, 0, alloc), "w_witness": w.witness})


@_claim("shift-identity", "mu_V = mu_W + v'(M) on every small reference instance")
def _shift_identity():
    bad = []
    for b in (BuiltinId.INTRO_2GOODS, BuiltinId.EXAMPLE1_LEXIMIN, BuiltinId.EXAMPLE2_PROPXE,
              BuiltinId.PROP_PROOF_GOODS, BuiltinId.EXAMPLE_CHORES_NEG, BuiltinId.EQ_COUNTEREX,
              BuiltinId.MEW_COUNTEREX):
        inst = builtin(b)
        if not verify_shift_identity(inst, mms_profile(inst)):
            bad.append(b.value)
    return "identity holds", "holds" if not bad else f"broken on {bad}", not bad, True, {}


@_claim("lemma1", "transformed table profiles are monotone with the right sign")
def _lemma1():
    g = verify_lemma1(transform(builtin(BuiltinId.VG_GOODS)), Kind.GOODS)
    c = verify_lemma1(transform(builtin(BuiltinId.VC_CHORES)), Kind.CHORES)
    return ("goods and chores reports all true", f"goods ok={g.ok}, chores ok={c.ok}",
            g.ok and c.ok, True, {"goods": g, "chores": c})


def _table_profile(inst):
    prof = mms_profile(inst)
    return prof, [a.mu_v for a in prof.agents], [a.mu_w for a in prof.agents], [a.shift for a in prof.agents]


def _max_min_own(inst) -> tuple[Fraction, Allocation]:
    """Largest possible smallest own utility, with the first allocation attaining it."""
    view = view_of(inst, "V")
    idx, key = optimum(view, Objective.MEW)
    return view.rational(key[0]), allocation_at(view.n, view.m, idx)


def _optima(inst, space, objective) -> list[Allocation]:
    view = view_of(inst, space)
    return [allocation_at(view.n, view.m, i) for i in optimal_indices(view, objective)]


@_claim("vg-profile", "goods table profile: inverse externality, shares and v'(M)")
def _vg_profile():
    e1 = F(1, 10**4)
    inst = builtin(BuiltinId.VG_GOODS)
    c = classify(inst)
    prof, mu_v, mu_w, shift = _table_profile(inst)
    ok = (c.kind, c.externality, c.correlated) == (Kind.GOODS, Externality.NEGATIVE, False)
    ok = ok and all(s == -4055000 + 1000 * e1 for s in shift)
    ok = ok and all(m == 4055000 for m in mu_w) and all(m == 1000 * e1 for m in mu_v)
    return ("GOODS, NEGATIVE, inverse; v'(M)=-4055000+10^3 eps1; mu_W=4055000; mu_V=10^3 eps1",
            f"{c.kind.name}, {c.externality.name}, correlated={c.correlated}; v'(M)={shift[0]}; "
            f"mu_W={[str(x) for x in mu_w]}; mu_V={[str(x) for x in mu_v]}",
            ok, verify_shift_identity(inst, prof), {})


@_claim("lemma2", "goods table profile admits no alpha-MMS allocation for any alpha in [0, 1]")
def _lemma2():
    inst = builtin(BuiltinId.VG_GOODS)
    prof = mms_profile(inst)
    res = best_alpha(inst, prof, Tag.ALPHA_MMS)
    maxmin, at = _max_min_own(inst)
    mus = prof.mu("V")
    ok = res.status == "NONE" and maxmin < 0 and all(m > 0 for m in mus)
    # alpha = 0 needs every utility >= 0, so a negative max-min must give NONE
    consistent = (res.status == "NONE") == (maxmin < 0)
    return ("NONE (max-min utility < 0 while every mu > 0)",
            f"{res}; max-min utility {maxmin}; mu_V={[str(m) for m in mus]}",
            ok, consistent, {"max_min_allocation": at})


def _integral(inst) -> tuple[bool, list]:
    w = transform(inst).one_d.w
    odd = [(i + 1, inst.item_ids[k], x) for i, row in enumerate(w) for k, x in enumerate(row)
           if x.denominator != 1]
    return not odd, odd


@_claim("lemma2-integrality", "the transformed goods table profile is integral", fragile=True)
def _lemma2_integrality():
    ok, odd = _integral(builtin(BuiltinId.VG_GOODS))
    return ("all transformed values integral", "integral" if ok else f"{len(odd)} non-integral entries",
            ok, True, {"first_non_integral": odd[:3]})


@_claim("vc-profile", "chores table profile: shares and v'(M)")
def _vc_profile():
    e1 = F(1, 10**4)
    inst = builtin(BuiltinId.VC_CHORES)
    c = classify(inst)
    prof, mu_v, mu_w, shift = _table_profile(inst)
    ok = c.kind is Kind.CHORES and all(s == 4055000 - 1000 * e1 for s in shift)
    ok = ok and all(m == -4055000 for m in mu_w) and all(m == -1000 * e1 for m in mu_v)
    return ("CHORES; v'(M)=4055000-10^3 eps1; mu_W=-4055000; mu_V=-10^3 eps1",
            f"{c.kind.name}, {c.externality.name}; v'(M)={shift[0]}; "
            f"mu_W={[str(x) for x in mu_w]}; mu_V={[str(x) for x in mu_v]}",
            ok, verify_shift_identity(inst, prof), {})


@_claim("lemma3", "chores table profile: best supported alpha below 10^3 eps1")
def _lemma3():
    inst = builtin(BuiltinId.VC_CHORES)
    prof = mms_profile(inst)
    res = best_alpha(inst, prof, Tag.ALPHA_MMS)
    ok = res.status == "NONE" or (res.alpha is not None and res.alpha < F(1, 10))
    consistent = True
    if res.witness is not None:
        consistent = check_mms_family("V", inst, res.witness, Notion(Tag.ALPHA_MMS, res.alpha), prof).holds
        consistent = consistent and supporting_allocation(inst, prof, Tag.ALPHA_MMS, res.alpha + F(1, 10**6)) is None
    return ("alpha* < 1/10", f"alpha* = {res}", ok, consistent, {"witness": res.witness})


@_claim("lemma3-integrality", "the transformed chores table profile is integral", fragile=True)
def _lemma3_integrality():
    ok, odd = _integral(builtin(BuiltinId.VC_CHORES))
    return ("all transformed values integral", "integral" if ok else f"{len(odd)} non-integral entries",
            ok, True, {"first_non_integral": odd[:3]})


def _vg_appendix():
    inst = builtin(BuiltinId.VG_APPENDIX)
    return inst, mms_profile(inst)


def _quoted_appendix_profile(inst, prof) -> MmsProfile:
    e1 = F(1, 10**5)
    plus, minus = 9 * 10**4 * e1, -8 * 10**4 * e1
    return MmsProfile(tuple(
        AgentShare(plus + minus, F(40550000), -40550000 + 10**4 * e1, a.partition, a.min_bundle, plus, minus)
        for a in prof.agents
    ))


@_claim("vg-appendix-profile", "modified goods profile: shares, decomposition, no MMS allocation", fragile=True)
def _vg_appendix_profile():
    e1 = F(1, 10**5)
    inst, prof = _vg_appendix()
    mms_alloc = search_predicate(inst, ["mms"], "V", prof)
    first = prof.agents[0]
    expected = {
        "mu_W": [F(40550000)] * 3,
        "mu_V": [10**4 * e1] * 3,
        "mu_plus": [9 * 10**4 * e1] * 3,
        "mu_minus": [-8 * 10**4 * e1] * 3,
        "v'(M)": [-40550000 + 10**4 * e1] * 3,
    }
    computed = {
        "mu_W": [a.mu_w for a in prof.agents],
        "mu_V": [a.mu_v for a in prof.agents],
        "mu_plus": [a.mu_plus for a in prof.agents],
        "mu_minus": [a.mu_minus for a in prof.agents],
        "v'(M)": [a.shift for a in prof.agents],
    }
    bundle1 = sorted(first.partition.bundle(first.min_bundle))
    ok = expected == computed and mms_alloc is None and bundle1 == [0, 1, 2, 3]
    mismatched = [k for k in expected if expected[k] != computed[k]]
    consistent = all(a.mu_plus + a.mu_minus == a.mu_v for a in prof.agents) and verify_shift_identity(inst, prof)
    return ("mu_W=40550000, mu_V=10^4 eps1, mu+=9*10^4 eps1, mu-=-8*10^4 eps1; no MMS allocation; "
            "agent 1 MMS bundle {k1..k4}",
            f"mismatched fields {mismatched}; MMS allocation "
            f"{'none' if mms_alloc is None else _bundles(mms_alloc, inst)}; agent 1 MMS bundle "
            f"{{{','.join(inst.item_ids[k] for k in bundle1)}}}",
            ok, consistent, {"computed": computed, "expected": expected})


@_claim("lemma6", "modified goods profile admits no alpha-MMS (I) allocation", fragile=True)
def _lemma6():
    inst, prof = _vg_appendix()
    res = best_alpha(inst, prof, Tag.ALPHA_MMS_I)
    quoted = best_alpha(inst, _quoted_appendix_profile(inst, prof), Tag.ALPHA_MMS_I)
    consistent = True
    if res.witness is not None:
        consistent = check_mms_family("V", inst, res.witness, Notion(Tag.ALPHA_MMS_I, res.alpha), prof).holds
    return ("NONE", f"{res} (with the quoted mu+/mu-: {quoted})", res.status == "NONE", consistent,
            {"witness": res.witness, "quoted_profile_witness": quoted.witness})


@_claim("lemma7", "modified goods profile admits no alpha-MMS (II) allocation at alpha = 8*10^4 eps1",
        fragile=True)
def _lemma7():
    inst, prof = _vg_appendix()
    alpha = 8 * 10**4 * F(1, 10**5)
    hit = supporting_allocation(inst, prof, Tag.ALPHA_MMS_II, alpha)
    quoted_prof = _quoted_appendix_profile(inst, prof)
    quoted = supporting_allocation(inst, quoted_prof, Tag.ALPHA_MMS_II, alpha)
    consistent = hit is None or check_mms_family("V", inst, hit, Notion(Tag.ALPHA_MMS_II, alpha), prof).holds
    res = best_alpha(inst, prof, Tag.ALPHA_MMS_II)
    return (f"no allocation at alpha = {alpha}",
            f"{'none' if hit is None else _bundles(hit, inst)}; best alpha {res}; "
            f"with the quoted mu+/mu-: {'none' if quoted is None else _bundles(quoted, inst)}",
            hit is None, consistent, {"witness": hit, "quoted_profile_witness": quoted})


@_claim("eq-counterex", "equitability is not preserved by the transformation")
def _eq_counterex():
    inst = builtin(BuiltinId.EQ_COUNTEREX)
    one_d = transform(inst).one_d
    a, b = Allocation([0, 0, 1, 1]), Allocation([1, 1, 0, 0])
    got = {
        "A: EQ in W": check_eq("W", one_d, a, Tag.EQ).holds,
        "A: EQ1 in V": check_eq("V", inst, a, Tag.EQ1).holds,
        "B: EQ in V": check_eq("V", inst, b, Tag.EQ).holds,
        "B: EQ1 in W": check_eq("W", one_d, b, Tag.EQ1).holds,
    }
    ok = got == {"A: EQ in W": True, "A: EQ1 in V": False, "B: EQ in V": True, "B: EQ1 in W": False}
    return ("A EQ in W, not EQ1 in V; B EQ in V, not EQ1 in W", str(got), ok, True, {})


@_claim("mew-counterex", "egalitarian welfare optima differ between the two spaces")
def _mew_counterex():
    inst = builtin(BuiltinId.MEW_COUNTEREX)
    v_set = _optima(inst, "V", Objective.MEW)
    w_set = _optima(inst, "W", Objective.MEW)
    ok = v_set == [Allocation([0, 0])] and w_set == [Allocation([0, 1])]
    return ("MEW(V) = {(g1,g2), ()}, MEW(W) = {(g1), (g2)}",
            f"MEW(V) = {[_bundles(x, inst) for x in v_set]}, MEW(W) = {[_bundles(x, inst) for x in w_set]}",
            ok, True, {})


FULLEXT_SEED = 2024


@_claim("fullext-gap", "beyond 2-D, PROP-E and average share differ in both directions")
def _fullext_gap():
    found = {}
    for direction in ("prop-e-only", "avg-share-only"):
        hit = search_fullext_gap(3, 4, FULLEXT_SEED, 10**5, want=direction)
        if hit is not None:
            found[direction] = hit
    consistent = True
    for direction, (inst, alloc, _) in found.items():
        p = check_prop_e("FULL", inst, alloc).holds
        s = check_average_share("FULL", inst, alloc).holds
        consistent &= (p, s) == ((True, False) if direction == "prop-e-only" else (False, True))
    # on 2-D embeddings the two notions must agree
    for seed in range(20):
        inst = random_instance(seed, 3, 3, "mixed", "mixed")
        full = FullInstance.embed(inst)
        for alloc in enumerate_allocations(3, 3):
            if check_prop_e("FULL", full, alloc).holds != check_average_share("FULL", full, alloc).holds:
                consistent = False
    ok = len(found) == 2
    return ("gaps in both directions", f"found {sorted(found)}", ok, consistent,
            {d: {"allocation": a.assignment, "v_full": inst.v_full} for d, (inst, a, _) in found.items()})


# --------------------------------------------------------------------------- runner


def run_suite(filter: Iterable[str] | None = None) -> list[ClaimResult]:
    """Run the selected claims (all when ``filter`` is None) in registration order."""
    if filter is None:
        selected = list(CLAIMS)
    else:
        wanted = {str(x).strip().lower() for x in filter}
        unknown = wanted - set(CLAIMS)
        if unknown:
            raise KeyError(f"unknown claim ids: {sorted(unknown)}")
        selected = [c for c in CLAIMS if c in wanted]
    return [CLAIMS[c].run() for c in selected]
