"""Allocation algorithms run on 1-D values, plus exhaustive optimizers.

The polynomial algorithms take an :class:`Instance1D`; passing an
:class:`Instance2D` runs them on its transformed values, which is how they
carry their guarantees over to utilities with externalities.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .checkers import MMS_TAGS, Notion, Tag, check, mms_threshold, instance_kind
from .core import (
    Allocation,
    Instance1D,
    Instance2D,
    Kind,
    MissingProfile,
    MixedSigns,
    Unsupported,
    allocation_at,
    kind_of,
)
from .mms import mms_profile
from .scan import Objective, optimum, own_blocks
from .transform import transform
from .views import Space, view_of


def _one_d(instance) -> Instance1D:
    if isinstance(instance, Instance2D):
        return transform(instance).one_d
    return instance


def _order(order, n: int) -> list[int]:
    if order is None:
        return list(range(n))
    order = [int(a) for a in order]
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {order} is not a permutation of 0..{n - 1}")
    return order


def _favourite(row, items) -> int:
    """Highest-valued item among ``items``; lowest index on ties."""
    return max(items, key=lambda k: (row[k], -k))


def round_robin(instance, order: Sequence[int] | None = None) -> Allocation:
    """Agents take turns picking their highest-valued remaining item."""
    inst = _one_d(instance)
    if kind_of(inst.w) is Kind.MIXED:
        raise MixedSigns("round robin needs all goods or all chores")
    order = _order(order, inst.n)
    assignment = [0] * inst.m
    remaining = set(range(inst.m))
    turn = 0
    while remaining:
        agent = order[turn % inst.n]
        k = _favourite(inst.w[agent], remaining)
        assignment[k] = agent
        remaining.discard(k)
        turn += 1
    return Allocation(assignment)


def double_round_robin(instance) -> Allocation:
    """Round robin over the common chores, then reversed round robin over the rest.

    Common chores (negative for every agent) are padded with zero-valued dummy
    items to a multiple of n and picked in order 0..n-1. The remaining items
    are picked in order n-1..0, repeatedly; an agent with no positively valued
    item left passes. Items nobody picks go to the lowest-index agent who
    values them at zero.
    """
    inst = _one_d(instance)
    n, m, w = inst.n, inst.m, inst.w
    assignment = [0] * m
    common = [k for k in range(m) if all(w[i][k] < 0 for i in range(n))]
    rest = set(range(m)) - set(common)

    dummies = (-len(common)) % n
    pool = set(common) | {m + d for d in range(dummies)}
    turn = 0
    while pool:
        agent = turn % n
        row = list(w[agent]) + [Fraction(0)] * dummies
        k = _favourite(row, pool)
        if k < m:
            assignment[k] = agent
        pool.discard(k)
        turn += 1

    reverse = list(range(n - 1, -1, -1))
    passes = 0
    turn = 0
    while rest and passes < n:
        agent = reverse[turn % n]
        turn += 1
        wanted = [k for k in rest if w[agent][k] > 0]
        if not wanted:
            passes += 1
            continue
        passes = 0
        k = _favourite(w[agent], wanted)
        assignment[k] = agent
        rest.discard(k)
    for k in sorted(rest):
        # not in the common chores, so somebody values it at exactly zero
        assignment[k] = next(i for i in range(n) if w[i][k] == 0)
    return Allocation(assignment)


def _envy_graph(w, bundles) -> list[list[int]]:
    """enviers[j] = agents who strictly prefer bundle j to their own."""
    n = len(bundles)
    vals = [[sum((w[i][k] for k in b), Fraction(0)) for b in bundles] for i in range(n)]
    return [[i for i in range(n) if i != j and vals[i][j] > vals[i][i]] for j in range(n)]


def envy_cycle(instance) -> Allocation:
    """Give items in index order to an unenvied agent, rotating envy cycles away."""
    inst = _one_d(instance)
    if kind_of(inst.w) is not Kind.GOODS:
        raise MixedSigns("envy-cycle elimination needs an all-goods instance")
    n, w = inst.n, inst.w
    bundles: list[list[int]] = [[] for _ in range(n)]
    for k in range(inst.m):
        while True:
            enviers = _envy_graph(w, bundles)
            free = [j for j in range(n) if not enviers[j]]
            if free:
                bundles[free[0]].append(k)
                break
            # walk backwards along envy edges until an agent repeats
            path, seen = [0], {0: 0}
            while True:
                nxt = enviers[path[-1]][0]
                if nxt in seen:
                    cycle = path[seen[nxt]:]
                    break
                seen[nxt] = len(path)
                path.append(nxt)
            # cycle[t+1] envies cycle[t]; each agent takes the bundle it envies
            old = [bundles[a] for a in cycle]
            for t, a in enumerate(cycle):
                bundles[a] = old[t - 1] if t else old[-1]
    return Allocation.from_bundles(bundles, inst.m)


def bag_fill_half_mms(instance, mu_w: Sequence) -> Allocation:
    """Half-MMS bag filling for goods, given each agent's exact 1-D maximin share.

    Items worth at least half a share to some agent are handed out first as
    singletons. Then bags are filled in decreasing order of agent 0's values
    until a remaining agent values the bag at half its share or more; the
    lowest-index such agent takes it. Items left at the end join the last bag.
    """
    inst = _one_d(instance)
    if kind_of(inst.w) is not Kind.GOODS:
        raise MixedSigns("bag filling needs an all-goods instance")
    if mu_w is None or len(mu_w) != inst.n:
        raise MissingProfile("bag filling needs one maximin share per agent")
    n, w = inst.n, inst.w
    half = [Fraction(mu) / 2 for mu in mu_w]
    agents = list(range(n))
    items = list(range(inst.m))
    assignment = [0] * inst.m

    reduced = True
    while reduced and len(agents) > 1:
        reduced = False
        for k in items:
            taker = next((i for i in agents if w[i][k] >= half[i]), None)
            if taker is not None:
                assignment[k] = taker
                items.remove(k)
                agents.remove(taker)
                reduced = True
                break

    items.sort(key=lambda k: (-w[0][k], k))
    last = agents[0] if agents else 0
    while agents:
        bag: list[int] = []
        taker = next((i for i in agents if half[i] <= 0), None)
        while taker is None and items:
            bag.append(items.pop(0))
            taker = next((i for i in agents if sum(w[i][k] for k in bag) >= half[i]), None)
        if taker is None:
            taker = agents[0]
        for k in bag:
            assignment[k] = taker
        agents.remove(taker)
        last = taker
    for k in items:
        assignment[k] = last
    return Allocation(assignment)


class Exhaustive(enum.Enum):
    MUW = "muw"
    MEW = "mew"
    LEXIMIN = "leximin"
    MNW_ON_W = "mnw"

    @classmethod
    def parse(cls, x) -> "Exhaustive":
        if isinstance(x, cls):
            return x
        name = (x.value if isinstance(x, enum.Enum) else str(x)).lower().replace("_", "-")
        name = {"leximin-opt": "leximin", "mnw-on-w": "mnw"}.get(name, name)
        try:
            return cls(name)
        except ValueError:
            raise Unsupported(f"unknown objective {x!r}") from None


_SCAN_OBJECTIVE = {
    Exhaustive.MUW: Objective.MUW,
    Exhaustive.MEW: Objective.MEW,
    Exhaustive.LEXIMIN: Objective.LEXIMIN,
    Exhaustive.MNW_ON_W: Objective.MNW,
}


def exhaustive_opt(instance, objective, space=None, threads: int = 1) -> Allocation:
    """First allocation in enumeration order attaining the objective's optimum.

    MNW maximizes the number of agents with positive utility, then the product
    of those utilities. It is only offered on 1-D goods values.
    """
    objective = Exhaustive.parse(objective)
    if space is None:
        space = Space.W if isinstance(instance, Instance1D) or objective is Exhaustive.MNW_ON_W else Space.V
    space = Space.parse(space)
    if objective is Exhaustive.MNW_ON_W:
        if space is not Space.W:
            raise Unsupported("Nash welfare is only defined on 1-D values")
        if kind_of(instance.w) is not Kind.GOODS:
            raise MixedSigns("Nash welfare needs non-negative values")
    view = view_of(instance, space)
    idx, _ = optimum(view, _SCAN_OBJECTIVE[objective], threads)
    return allocation_at(view.n, view.m, idx)


def _share_filter(instance, notion: Notion, space: Space, profile):
    """Scaled per-agent thresholds for notions that are a plain share comparison."""
    if notion.tag not in MMS_TAGS or notion.tag in (Tag.MMS1, Tag.MMSX):
        return None
    profile = profile or mms_profile(instance)
    view = view_of(instance, space)
    kind = instance_kind(instance) if notion.tag is Tag.SHIFTED_ALPHA_MMS else None
    out = []
    for a in profile.agents:
        mu = a.mu_v if space is Space.V else a.mu_w
        shift = a.shift if space is Space.V else Fraction(0)
        thr = mms_threshold(notion.tag, notion.alpha, mu, shift, kind, a.mu_plus, a.mu_minus)
        out.append(math.ceil(thr * view.scale))
    return out


def search_predicate(instance, notions: Sequence, space="V", profile=None,
                     threads: int = 1) -> Allocation | None:
    """First allocation in enumeration order meeting every notion, or None.

    Share-style notions are screened in bulk on the own-value table; the
    remaining notions are decided per candidate by the checkers.
    """
    space = Space.parse(space)
    notions = [n if isinstance(n, Notion) else Notion.parse(n) if isinstance(n, str) else Notion(n)
               for n in notions]
    view = view_of(instance, space)
    needs_profile = any(n.tag in MMS_TAGS for n in notions)
    if needs_profile and profile is None:
        profile = mms_profile(instance, threads)
    for n in notions:
        # surface a bad alpha or a missing decomposition before scanning
        if n.tag in MMS_TAGS:
            check(n, space, instance, Allocation([0] * view.m), profile)
    filters, rest = [], []
    for n in notions:
        thr = _share_filter(instance, n, space, profile)
        if thr is None:
            rest.append(n)
        else:
            filters.append(thr)
    for lo, table in own_blocks(view, threads):
        ok = np.ones(len(table), dtype=bool)
        for thr in filters:
            bound = np.array([min(max(t, int(table.min()) - 1), int(table.max()) + 1) for t in thr],
                             dtype=object).astype(table.dtype)
            ok &= np.all(table >= bound, axis=1)
        for r in np.flatnonzero(ok):
            alloc = allocation_at(view.n, view.m, lo + int(r))
            if all(check(n, space, instance, alloc, profile, threads).holds for n in rest):
                return alloc
    return None


__all__ = [
    "Exhaustive",
    "bag_fill_half_mms",
    "double_round_robin",
    "envy_cycle",
    "exhaustive_opt",
    "round_robin",
    "search_predicate",
]
