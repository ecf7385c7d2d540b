"""Fairness and efficiency checkers with re-checkable violation witnesses.

All envy- and share-style checks work on a :class:`~extfair.views.ScaledView`,
so the same code decides a notion in the 2-D space V (utilities with
externalities) and in the transformed 1-D space W. "u_i(A_j)" is always agent
i's utility when holding exactly bundle A_j.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING

from .core import (
    Allocation,
    BadAlpha,
    FullInstance,
    Instance1D,
    Instance2D,
    ItemClass,
    Kind,
    MissingProfile,
    Unsupported,
    UnsupportedLevel,
    WrongSpace,
    allocation_at,
    as_rational,
    kind_of,
    utility_full,
)
from .scan import Objective, first_dominating, key_of, optimum
from .views import Space, view_of

if TYPE_CHECKING:  # pragma: no cover
    from .mms import MmsProfile


class Tag(enum.Enum):
    EF = "ef"
    EF1 = "ef1"
    EFX = "efx"
    PROP = "prop"
    PROP_E = "prop-e"
    PROP1_E = "prop1-e"
    PROPX_E = "propx-e"
    AVG_SHARE = "avg-share"
    MMS = "mms"
    ALPHA_MMS = "alpha-mms"
    SHIFTED_ALPHA_MMS = "shifted-alpha-mms"
    MMS1 = "mms1"
    MMSX = "mmsx"
    ALPHA_MMS_I = "alpha-mms-i"
    ALPHA_MMS_II = "alpha-mms-ii"
    EQ = "eq"
    EQ1 = "eq1"
    EQX = "eqx"
    PO = "po"
    MUW = "muw"
    MEW = "mew"
    LEXIMIN_OPT = "leximin-opt"


ALPHA_TAGS = {Tag.ALPHA_MMS, Tag.SHIFTED_ALPHA_MMS, Tag.ALPHA_MMS_I, Tag.ALPHA_MMS_II}
MMS_TAGS = ALPHA_TAGS | {Tag.MMS, Tag.MMS1, Tag.MMSX}


@dataclass(frozen=True)
class Notion:
    tag: Tag
    alpha: Fraction | None = None

    def __post_init__(self):
        if self.alpha is not None:
            object.__setattr__(self, "alpha", as_rational(self.alpha))
        if self.tag in ALPHA_TAGS and self.alpha is None:
            raise BadAlpha(f"{self.tag.value} needs an alpha")

    @classmethod
    def parse(cls, name: str, alpha=None) -> "Notion":
        try:
            tag = Tag(name.strip().lower().replace("_", "-"))
        except ValueError:
            raise ValueError(f"unknown notion {name!r}") from None
        return cls(tag, alpha if tag in ALPHA_TAGS else None)

    def __str__(self) -> str:
        return self.tag.value if self.alpha is None else f"{self.tag.value}({self.alpha})"


@dataclass(frozen=True)
class Verdict:
    notion: str
    holds: bool
    witness: dict | None = field(default=None, compare=False)

    def __bool__(self) -> bool:
        return self.holds


def _name(notion) -> str:
    return notion.value if isinstance(notion, Tag) else str(notion)


def _ok(notion) -> Verdict:
    return Verdict(_name(notion), True)


def _fail(notion, **witness) -> Verdict:
    return Verdict(_name(notion), False, witness)


def _bits(mask: int):
    k = 0
    while mask:
        if mask & 1:
            yield k
        mask >>= 1
        k += 1


def _prepare(space, instance, alloc: Allocation):
    view = view_of(instance, Space.parse(space))
    alloc.validate(view.n, view.m)
    return view, alloc.masks(view.n)


# --------------------------------------------------------------------------- envy


def check_envy(space, instance, alloc: Allocation, level: Tag = Tag.EF) -> Verdict:
    level = Tag(level)
    if level not in (Tag.EF, Tag.EF1, Tag.EFX):
        raise UnsupportedLevel(level)
    view, masks = _prepare(space, instance, alloc)
    r = view.rational
    for i in range(view.n):
        mi = masks[i]
        own = view.value(i, mi)
        for j in range(view.n):
            if i == j:
                continue
            mj = masks[j]
            other = view.value(i, mj)
            if level is Tag.EF:
                if own < other:
                    return _fail(level, agent=i, other=j, item=None, lhs=r(own), rhs=r(other))
            elif level is Tag.EF1:
                if own >= other:
                    continue
                if not any(
                    view.value(i, mi & ~(1 << k)) >= view.value(i, mj & ~(1 << k))
                    for k in _bits(mi | mj)
                ):
                    return _fail(level, agent=i, other=j, item=None, lhs=r(own), rhs=r(other))
            else:
                for k in _bits(mj):
                    if view.is_good(i, k):
                        rhs = view.value(i, mj & ~(1 << k))
                        if own < rhs:
                            return _fail(level, agent=i, other=j, item=k, lhs=r(own), rhs=r(rhs))
                for k in _bits(mi):
                    if view.is_chore(i, k):
                        lhs = view.value(i, mi & ~(1 << k))
                        if lhs < other:
                            return _fail(level, agent=i, other=j, item=k, lhs=r(lhs), rhs=r(other))
    return _ok(level)


# --------------------------------------------------------------------------- proportionality


def check_prop(instance, alloc: Allocation, space="W") -> Verdict:
    """Classic proportionality; only meaningful without externalities."""
    if Space.parse(space) is not Space.W or not isinstance(instance, Instance1D):
        raise WrongSpace("PROP is defined for 1-D instances only; use PROP-E in 2-D")
    view, masks = _prepare(Space.W, instance, alloc)
    full = (1 << view.m) - 1
    for i in range(view.n):
        own = view.value(i, masks[i])
        total = view.value(i, full)
        if view.n * own < total:
            return _fail(Tag.PROP, agent=i, item=None, lhs=view.rational(own),
                         rhs=view.rational(total) / view.n)
    return _ok(Tag.PROP)


def _swap(alloc: Allocation, i: int, j: int) -> Allocation:
    swap = {i: j, j: i}
    return Allocation([swap.get(a, a) for a in alloc.assignment])


def prop_e_threshold_full(instance: FullInstance, agent: int, alloc: Allocation) -> Fraction:
    """(1/n) * sum_j u_i(A with i and j exchanging bundles)."""
    total = sum(
        (utility_full(instance, agent, _swap(alloc, agent, j)) for j in range(instance.n)),
        Fraction(0),
    )
    return total / instance.n


def check_prop_e(space, instance, alloc: Allocation, level: Tag = Tag.PROP_E) -> Verdict:
    level = Tag(level)
    if level not in (Tag.PROP_E, Tag.PROP1_E, Tag.PROPX_E):
        raise UnsupportedLevel(level)
    space = Space.parse(space)
    if space is Space.FULL:
        if level is not Tag.PROP_E:
            raise UnsupportedLevel("full externalities support PROP-E only")
        if not isinstance(instance, FullInstance):
            raise WrongSpace("space FULL needs a FullInstance")
        alloc.validate(instance.n, instance.m)
        for i in range(instance.n):
            own = utility_full(instance, i, alloc)
            thr = prop_e_threshold_full(instance, i, alloc)
            if own < thr:
                return _fail(level, agent=i, item=None, lhs=own, rhs=thr)
        return _ok(level)

    view, masks = _prepare(space, instance, alloc)
    n, full = view.n, (1 << view.m) - 1
    for i in range(n):
        mi = masks[i]
        s = sum(view.value(i, mj) for mj in masks)  # n * threshold
        own = view.value(i, mi)
        rhs = Fraction(s, n * view.scale)
        if level is Tag.PROP_E:
            if n * own < s:
                return _fail(level, agent=i, item=None, lhs=view.rational(own), rhs=rhs)
        elif level is Tag.PROP1_E:
            if n * own >= s:
                continue
            if any(n * view.value(i, mi | 1 << k) >= s for k in _bits(full & ~mi)):
                continue
            if any(n * view.value(i, mi & ~(1 << k)) >= s for k in _bits(mi)):
                continue
            return _fail(level, agent=i, item=None, lhs=view.rational(own), rhs=rhs)
        else:
            for k in _bits(full & ~mi):
                if view.is_good(i, k):
                    val = view.value(i, mi | 1 << k)
                    if n * val < s:
                        return _fail(level, agent=i, item=k, lhs=view.rational(val), rhs=rhs)
            for k in _bits(mi):
                if view.is_chore(i, k):
                    val = view.value(i, mi & ~(1 << k))
                    if n * val < s:
                        return _fail(level, agent=i, item=k, lhs=view.rational(val), rhs=rhs)
    return _ok(level)


def average_share(instance, agent: int) -> Fraction:
    """sum_k (v_ik + (n-1) v'_ik) / n in 2-D; (1/n) sum_k sum_j v_ijk with full externalities."""
    n = instance.n
    if isinstance(instance, FullInstance):
        t = instance.v_full[agent]
        return sum((t[j][k] for j in range(n) for k in range(instance.m)), Fraction(0)) / n
    v, vp = instance.v[agent], instance.vprime[agent]
    return sum((a + (n - 1) * b for a, b in zip(v, vp)), Fraction(0)) / n


def check_average_share(space, instance, alloc: Allocation) -> Verdict:
    space = Space.parse(space)
    if space is Space.FULL:
        if not isinstance(instance, FullInstance):
            raise WrongSpace("space FULL needs a FullInstance")
        alloc.validate(instance.n, instance.m)
        for i in range(instance.n):
            own, share = utility_full(instance, i, alloc), average_share(instance, i)
            if own < share:
                return _fail(Tag.AVG_SHARE, agent=i, item=None, lhs=own, rhs=share)
        return _ok(Tag.AVG_SHARE)
    if space is not Space.V or not isinstance(instance, Instance2D):
        raise WrongSpace("average share is defined in V or FULL")
    view, masks = _prepare(space, instance, alloc)
    n = view.n
    for i in range(n):
        share_n = sum(a + (n - 1) * b for a, b in zip(view.inside[i], view.outside[i]))
        own = view.value(i, masks[i])
        if n * own < share_n:
            return _fail(Tag.AVG_SHARE, agent=i, item=None, lhs=view.rational(own),
                         rhs=Fraction(share_n, n * view.scale))
    return _ok(Tag.AVG_SHARE)


# --------------------------------------------------------------------------- maximin share family


def instance_kind(instance) -> Kind:
    w = instance.w
    return kind_of(w)


def alpha_range(tag: Tag, mus=()) -> tuple[Fraction, bool]:
    """(lower end, lower end included?) of the admissible alpha interval; upper end is 1."""
    if tag is Tag.ALPHA_MMS:
        closed = all(mu >= 0 for mu in mus)
        return Fraction(0), closed
    if tag is Tag.ALPHA_MMS_I:
        return Fraction(0), True
    return Fraction(0), False


def _check_alpha(tag: Tag, alpha: Fraction, mus=()) -> None:
    lo, closed = alpha_range(tag, mus)
    if alpha > 1 or alpha < lo or (alpha == lo and not closed):
        raise BadAlpha(f"alpha={alpha} outside the admissible range of {tag.value}")


def mms_threshold(tag: Tag, alpha, mu, shift=Fraction(0), kind: Kind | None = None,
                  mu_plus=None, mu_minus=None) -> Fraction:
    """The share an agent must reach under an MMS-family notion."""
    if tag in (Tag.MMS, Tag.MMS1, Tag.MMSX):
        return mu
    if tag is Tag.ALPHA_MMS:
        return alpha * mu if mu >= 0 else mu / alpha
    if tag is Tag.SHIFTED_ALPHA_MMS:
        if kind is Kind.GOODS:
            return alpha * mu + (1 - alpha) * shift
        if kind is Kind.CHORES:
            return mu / alpha + (alpha - 1) / alpha * shift
        raise Unsupported("shifted alpha-MMS needs a GOODS or CHORES instance")
    if tag is Tag.ALPHA_MMS_I:
        return alpha * mu_plus + (1 + alpha) * mu_minus
    if tag is Tag.ALPHA_MMS_II:
        return alpha * mu_plus + mu_minus / alpha
    raise UnsupportedLevel(tag)


def check_mms_family(space, instance, alloc: Allocation, notion: Notion, profile: "MmsProfile") -> Verdict:
    tag, alpha = notion.tag, notion.alpha
    if tag not in MMS_TAGS:
        raise UnsupportedLevel(tag)
    space = Space.parse(space)
    if profile is None:
        raise MissingProfile("an MMS profile is required")
    view, masks = _prepare(space, instance, alloc)
    if len(profile.agents) != view.n:
        raise MissingProfile("profile does not match the instance")
    if space is Space.V:
        mus = [a.mu_v for a in profile.agents]
        shifts = [a.shift for a in profile.agents]
    else:
        mus = [a.mu_w for a in profile.agents]
        shifts = [Fraction(0)] * view.n
    if any(mu is None for mu in mus):
        raise MissingProfile(f"profile lacks maximin shares for space {space.value}")
    kind = None
    if tag in ALPHA_TAGS:
        _check_alpha(tag, alpha, mus)
    if tag is Tag.SHIFTED_ALPHA_MMS:
        kind = instance_kind(instance)
        if kind is Kind.MIXED:
            raise Unsupported("shifted alpha-MMS needs a GOODS or CHORES instance")
    if tag in (Tag.ALPHA_MMS_I, Tag.ALPHA_MMS_II):
        if space is not Space.V:
            raise WrongSpace(f"{tag.value} is defined on 2-D utilities")
        if any(a.mu_plus is None for a in profile.agents):
            raise MissingProfile("profile lacks the mu+/mu- decomposition")

    full = (1 << view.m) - 1
    for i in range(view.n):
        a = profile.agents[i]
        thr = mms_threshold(tag, alpha, mus[i], shifts[i], kind, a.mu_plus, a.mu_minus)
        # compare scaled integers against the scaled threshold
        bar = thr * view.scale
        mi = masks[i]
        own = view.value(i, mi)
        if tag is Tag.MMS1:
            if own >= bar:
                continue
            if any(view.value(i, mi | 1 << k) >= bar for k in _bits(full & ~mi)):
                continue
            if any(view.value(i, mi & ~(1 << k)) >= bar for k in _bits(mi)):
                continue
            return _fail(notion, agent=i, item=None, lhs=view.rational(own), rhs=thr)
        if tag is Tag.MMSX:
            for k in _bits(full & ~mi):
                if view.is_good(i, k):
                    val = view.value(i, mi | 1 << k)
                    if val < bar:
                        return _fail(notion, agent=i, item=k, lhs=view.rational(val), rhs=thr)
            for k in _bits(mi):
                if view.is_chore(i, k):
                    val = view.value(i, mi & ~(1 << k))
                    if val < bar:
                        return _fail(notion, agent=i, item=k, lhs=view.rational(val), rhs=thr)
            continue
        if own < bar:
            return _fail(notion, agent=i, item=None, lhs=view.rational(own), rhs=thr)
    return _ok(notion)


# --------------------------------------------------------------------------- equitability


def check_eq(space, instance, alloc: Allocation, level: Tag = Tag.EQ) -> Verdict:
    level = Tag(level)
    if level not in (Tag.EQ, Tag.EQ1, Tag.EQX):
        raise UnsupportedLevel(level)
    view, masks = _prepare(space, instance, alloc)
    r = view.rational
    own = [view.value(i, masks[i]) for i in range(view.n)]
    for i in range(view.n):
        for j in range(view.n):
            if i == j:
                continue
            mi, mj = masks[i], masks[j]
            if level is Tag.EQ:
                if own[i] != own[j]:
                    return _fail(level, agent=i, other=j, item=None, lhs=r(own[i]), rhs=r(own[j]))
            elif level is Tag.EQ1:
                if own[i] >= own[j]:
                    continue
                if not any(
                    view.value(i, mi & ~(1 << k)) >= view.value(j, mj & ~(1 << k))
                    for k in _bits(mi | mj)
                ):
                    return _fail(level, agent=i, other=j, item=None, lhs=r(own[i]), rhs=r(own[j]))
            else:
                # removal branches: w >= 0 for the item leaving A_j (judged by j),
                # w <= 0 for the item leaving A_i (judged by i)
                for k in _bits(mj):
                    if not view.is_chore(j, k):
                        rhs = view.value(j, mj & ~(1 << k))
                        if own[i] < rhs:
                            return _fail(level, agent=i, other=j, item=k, lhs=r(own[i]), rhs=r(rhs))
                for k in _bits(mi):
                    if view.classes[i][k] is not ItemClass.GOOD:
                        lhs = view.value(i, mi & ~(1 << k))
                        if lhs < own[j]:
                            return _fail(level, agent=i, other=j, item=k, lhs=r(lhs), rhs=r(own[j]))
    return _ok(level)


# --------------------------------------------------------------------------- efficiency


def _default_space(instance, space):
    if space is not None:
        return Space.parse(space)
    return Space.W if isinstance(instance, Instance1D) else Space.V


def check_pareto(instance, alloc: Allocation, space=None, threads: int = 1) -> Verdict:
    view, masks = _prepare(_default_space(instance, space), instance, alloc)
    own = [view.value(i, masks[i]) for i in range(view.n)]
    idx = first_dominating(view, own, threads)
    if idx is None:
        return _ok(Tag.PO)
    better = allocation_at(view.n, view.m, idx)
    return _fail(Tag.PO, allocation=better,
                 utilities=[view.rational(x) for x in own],
                 dominating=[view.rational(view.value(i, m)) for i, m in enumerate(better.masks(view.n))])


_OBJECTIVE_OF = {Tag.MUW: Objective.MUW, Tag.MEW: Objective.MEW, Tag.LEXIMIN_OPT: Objective.LEXIMIN}


def check_welfare_opt(instance, alloc: Allocation, objective: Tag, space=None, threads: int = 1) -> Verdict:
    objective = Tag(objective)
    if objective not in _OBJECTIVE_OF:
        raise UnsupportedLevel(objective)
    view, masks = _prepare(_default_space(instance, space), instance, alloc)
    obj = _OBJECTIVE_OF[objective]
    own = [view.value(i, masks[i]) for i in range(view.n)]
    idx, best = optimum(view, obj, threads)
    mine = key_of(own, obj)
    if mine == best:
        return _ok(objective)
    better = allocation_at(view.n, view.m, idx)
    return _fail(objective, allocation=better,
                 utilities=[view.rational(x) for x in own],
                 better_utilities=[view.rational(view.value(i, m)) for i, m in enumerate(better.masks(view.n))])


# --------------------------------------------------------------------------- dispatch


def check(notion, space, instance, alloc: Allocation, profile=None, threads: int = 1) -> Verdict:
    """Decide one notion; ``notion`` is a Notion, a Tag, or a lower-kebab name."""
    if isinstance(notion, str):
        notion = Notion.parse(notion)
    elif isinstance(notion, Tag):
        notion = Notion(notion)
    tag = notion.tag
    if tag in (Tag.EF, Tag.EF1, Tag.EFX):
        return check_envy(space, instance, alloc, tag)
    if tag is Tag.PROP:
        return check_prop(instance, alloc, space)
    if tag in (Tag.PROP_E, Tag.PROP1_E, Tag.PROPX_E):
        return check_prop_e(space, instance, alloc, tag)
    if tag is Tag.AVG_SHARE:
        return check_average_share(space, instance, alloc)
    if tag in MMS_TAGS:
        return check_mms_family(space, instance, alloc, notion, profile)
    if tag in (Tag.EQ, Tag.EQ1, Tag.EQX):
        return check_eq(space, instance, alloc, tag)
    if tag is Tag.PO:
        return check_pareto(instance, alloc, space, threads)
    return check_welfare_opt(instance, alloc, tag, space, threads)


# --------------------------------------------------------------------------- full externalities


def search_fullext_gap(n: int = 3, m: int = 4, seed: int = 0, trials: int = 10**5,
                       want: str | None = None, low: int = -5, high: int = 5):
    """Random search for a full-externality instance where PROP-E and average share disagree.

    Returns ``(instance, allocation, direction)`` for the first hit, where
    direction is ``"prop-e-only"`` (PROP-E holds, average share fails) or
    ``"avg-share-only"``; ``want`` restricts the search to one direction.
    Integer values are drawn uniformly from [low, high].
    """
    if n != 3 or not 0 <= m <= 6:
        raise ValueError("the search runs with n = 3 and m <= 6")
    rng = random.Random(seed)
    for _ in range(trials):
        tensor = [[[Fraction(rng.randint(low, high)) for _ in range(m)] for _ in range(n)]
                  for _ in range(n)]
        inst = FullInstance(tensor)
        alloc = Allocation([rng.randrange(n) for _ in range(m)])
        prop_e = check_prop_e(Space.FULL, inst, alloc).holds
        avg = check_average_share(Space.FULL, inst, alloc).holds
        if prop_e == avg:
            continue
        direction = "prop-e-only" if prop_e else "avg-share-only"
        if want is None or want == direction:
            return inst, alloc, direction
    return None
