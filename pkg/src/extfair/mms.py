"""Exact maximin shares, the mu+ / mu- decomposition, and best-supported alpha.

Shares are computed by scanning every allocation (labelled n-partition) of
the items. The canonical optimal partition is the first one reached in
enumeration order; its minimizing bundle is the lowest-index one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .checkers import ALPHA_TAGS, Tag, alpha_range
from .core import (
    Allocation,
    Instance1D,
    Instance2D,
    Kind,
    Unsupported,
    WrongSpace,
    allocation_at,
    kind_of,
    map_blocks,
)
from .scan import own_blocks
from .views import Space, view_of


@dataclass(frozen=True)
class MmsShare:
    mu: Fraction
    partition: Allocation
    min_bundle: int


@dataclass(frozen=True)
class AgentShare:
    mu_v: Fraction | None
    mu_w: Fraction
    shift: Fraction
    partition: Allocation
    min_bundle: int
    mu_plus: Fraction | None = None
    mu_minus: Fraction | None = None


@dataclass(frozen=True)
class MmsProfile:
    agents: tuple

    def mu(self, space) -> list:
        space = Space.parse(space)
        return [a.mu_v if space is Space.V else a.mu_w for a in self.agents]


def mms_share(instance, agent: int, space="V", threads: int = 1) -> MmsShare:
    """max over n-partitions of the agent's worst bundle, with the canonical optimum."""
    view = view_of(instance, Space.parse(space))
    if not 0 <= agent < view.n:
        raise ValueError(f"no agent {agent}")

    def block(lo, assign):
        table = np.stack([view.holder_values(agent, assign, j) for j in range(view.n)], axis=1)
        mins = table.min(axis=1)
        r = int(np.argmax(mins))
        row = table[r].tolist()
        return mins[r], lo + r, row

    best = None
    for val, idx, row in map_blocks(block, view.n, view.m, threads):
        if best is None or val > best[0]:
            best = (val, idx, row)
    val, idx, row = best
    partition = allocation_at(view.n, view.m, idx)
    return MmsShare(view.rational(val), partition, row.index(min(row)))


def mms_decompose(instance: Instance2D, agent: int, profile: MmsProfile) -> tuple[Fraction, Fraction]:
    """(mu+, mu-) read off the canonical minimizing bundle B* of the 2-D share.

    Goods: mu+ = v_i(B*), mu- = v'_i(M - B*). Chores: the roles swap.
    """
    kind = kind_of(instance.w)
    if kind is Kind.MIXED:
        raise Unsupported("mu+/mu- is defined for GOODS or CHORES instances")
    share = profile.agents[agent]
    inside = share.partition.bundle(share.min_bundle)
    v_in = sum((instance.v[agent][k] for k in inside), Fraction(0))
    vp_out = sum((instance.vprime[agent][k] for k in range(instance.m) if k not in inside), Fraction(0))
    return (v_in, vp_out) if kind is Kind.GOODS else (vp_out, v_in)


def mms_profile(instance, threads: int = 1) -> MmsProfile:
    """Shares in both spaces; V and W are scanned independently."""
    if isinstance(instance, Instance1D):
        agents = []
        for i in range(instance.n):
            s = mms_share(instance, i, Space.W, threads)
            agents.append(AgentShare(None, s.mu, Fraction(0), s.partition, s.min_bundle))
        return MmsProfile(tuple(agents))
    agents = []
    for i in range(instance.n):
        sv = mms_share(instance, i, Space.V, threads)
        sw = mms_share(instance, i, Space.W, threads)
        shift = sum(instance.vprime[i], Fraction(0))
        agents.append(AgentShare(sv.mu, sw.mu, shift, sv.partition, sv.min_bundle))
    profile = MmsProfile(tuple(agents))
    if kind_of(instance.w) is Kind.MIXED:
        return profile
    decomposed = []
    for i, a in enumerate(agents):
        plus, minus = mms_decompose(instance, i, profile)
        decomposed.append(AgentShare(a.mu_v, a.mu_w, a.shift, a.partition, a.min_bundle, plus, minus))
    return MmsProfile(tuple(decomposed))


def verify_shift_identity(instance: Instance2D, profile: MmsProfile) -> bool:
    """mu_V == mu_W + v'(M) for every agent."""
    return all(
        a.mu_v == a.mu_w + sum(instance.vprime[i], Fraction(0))
        for i, a in enumerate(profile.agents)
    )


# --------------------------------------------------------------------------- best alpha


@dataclass(frozen=True)
class AlphaResult:
    status: str  # "VALUE", "NONE" or "ALL"
    alpha: Fraction | None
    witness: Allocation | None
    exact: bool = True
    upper: Fraction | None = None  # for inexact results: smallest unsupported value tried
    zero_mu: tuple = ()

    def __str__(self) -> str:
        if self.status != "VALUE":
            return self.status
        return str(self.alpha) if self.exact else f"[{self.alpha}, {self.upper})"


def _coefficients(instance, profile: MmsProfile, tag: Tag, space: Space):
    """Per agent (c, d, e): the share is c + d*alpha + e/alpha."""
    kind = kind_of(instance.w)
    out = []
    for a in profile.agents:
        mu = a.mu_v if space is Space.V else a.mu_w
        s = a.shift if space is Space.V else Fraction(0)
        if tag is Tag.ALPHA_MMS:
            out.append((Fraction(0), mu, Fraction(0)) if mu >= 0 else (Fraction(0), Fraction(0), mu))
        elif tag is Tag.SHIFTED_ALPHA_MMS:
            if kind is Kind.GOODS:
                out.append((s, mu - s, Fraction(0)))
            else:
                out.append((s, Fraction(0), mu - s))
        elif tag is Tag.ALPHA_MMS_I:
            out.append((a.mu_minus, a.mu_plus + a.mu_minus, Fraction(0)))
        else:
            out.append((Fraction(0), a.mu_plus, a.mu_minus))
    return out


_INF = None  # marker for an unbounded side


def _agent_interval(u: Fraction, c: Fraction, d: Fraction, e: Fraction):
    """{alpha : u >= c + d*alpha + e/alpha} for constraints with d == 0 or e == 0.

    Returns (lo, hi) with None for unbounded ends, or False when empty.
    """
    slack = u - c
    if e == 0:
        if d > 0:
            return _INF, slack / d
        if d < 0:
            return slack / d, _INF
        return (_INF, _INF) if slack >= 0 else False
    # e/alpha <= slack with alpha > 0
    if e < 0:
        return (_INF, _INF) if slack >= 0 else (_INF, e / slack)
    return (e / slack, _INF) if slack > 0 else False


def _row_interval(row, coeffs, scale, range_lo, range_closed):
    lo, hi = range_lo, Fraction(1)
    lo_closed = range_closed
    for x, (c, d, e) in zip(row, coeffs):
        iv = _agent_interval(Fraction(x, scale), c, d, e)
        if iv is False:
            return None
        a, b = iv
        if a is not None and a > lo:
            lo, lo_closed = a, True
        if b is not None and b < hi:
            hi = b
    if lo < hi or (lo == hi and lo_closed):
        return hi
    return None


def _float_bounds(table, coeffs, scale: int, range_lo: Fraction):
    """Float lower / upper alpha bounds per row; the sign of every slack is exact."""
    rows = len(table)
    lo = np.full(rows, float(range_lo))
    hi = np.ones(rows)
    for i, (c, d, e) in enumerate(coeffs):
        cs = c * scale
        col = table[:, i]
        if col.dtype == object or abs(cs.numerator) > 2**31 or cs.denominator > 2**20:
            diff = col.astype(object) * cs.denominator - cs.numerator
        else:
            diff = col * cs.denominator - cs.numerator
        sign = np.sign(diff).astype(np.int8)
        slack = np.asarray(diff, dtype=float) / float(cs.denominator * scale)
        with np.errstate(divide="ignore", invalid="ignore"):
            if e == 0:
                if d > 0:
                    hi = np.minimum(hi, slack / float(d))
                elif d < 0:
                    lo = np.maximum(lo, slack / float(d))
                else:
                    hi = np.where(sign < 0, -np.inf, hi)
            elif e < 0:
                hi = np.minimum(hi, np.where(sign < 0, float(e) / slack, np.inf))
            else:
                lo = np.maximum(lo, np.where(sign > 0, float(e) / slack, np.inf))
    return lo, hi


def _best_row(table, coeffs, scale: int, range_lo: Fraction, range_closed: bool):
    """(exact supremum, first row attaining it) over one table; (None, None) if empty.

    A float pass ranks the rows; only rows within a safety margin of the best
    float value are re-evaluated exactly, so the result is exact.
    """
    if len(table) == 0:
        return None, None
    lo_f, hi_f = _float_bounds(table, coeffs, scale, range_lo)
    key = np.where(lo_f <= hi_f + 1e-9, hi_f, -np.inf)
    done = np.zeros(len(table), dtype=bool)
    best_hi, best_idx = None, None
    target = None
    while True:
        live = ~done & np.isfinite(key) if target is None else ~done & (key >= target)
        if target is None:
            if not live.any():
                return None, None
            top = key[live].max()
            live &= key >= top - 1e-9 * max(1.0, abs(top))
        cand = np.flatnonzero(live)
        done[cand] = True
        for r in cand.tolist():
            h = _row_interval(table[r].tolist(), coeffs, scale, range_lo, range_closed)
            if h == 1 and target is None:
                # nothing beats the top of the range; candidates run in index order
                return h, r
            if h is not None and (best_hi is None or h > best_hi or (h == best_hi and r < best_idx)):
                best_hi, best_idx = h, r
        if best_hi is not None:
            if target is not None:
                return best_hi, best_idx
            # rows whose float key could still exceed the exact best
            target = float(best_hi) - 1e-9 * max(1.0, abs(float(best_hi)))
        elif not (~done & np.isfinite(key)).any():
            return None, None


def _thresholds_scaled(coeffs, alpha: Fraction, scale: int) -> list[int]:
    """Smallest scaled integer utility meeting each agent's share at ``alpha``."""
    out = []
    for c, d, e in coeffs:
        thr = c + d * alpha + (e / alpha if e else 0)
        out.append(math.ceil(thr * scale))
    return out


def supporting_allocation(instance, profile: MmsProfile, tag: Tag, alpha, space="V",
                          threads: int = 1) -> Allocation | None:
    """First allocation (enumeration order) satisfying the alpha-variant, or None."""
    space = Space.parse(space)
    view = view_of(instance, space)
    alpha = Fraction(alpha)
    if alpha <= 0 and any(e != 0 for _, _, e in _coefficients(instance, profile, tag, space)):
        return None
    thr = _thresholds_scaled(_coefficients(instance, profile, tag, space), alpha, view.scale)
    for lo, table in own_blocks(view, threads):
        if len(table) == 0:
            continue
        # clipping keeps huge thresholds (alpha near 0) inside the table's dtype
        floor_, ceil_ = int(table.min()) - 1, int(table.max()) + 1
        clipped = [min(max(t, floor_), ceil_) for t in thr]
        ok = np.all(table >= np.array(clipped, dtype=object).astype(table.dtype), axis=1)
        hit = np.flatnonzero(ok)
        if len(hit):
            return allocation_at(view.n, view.m, lo + int(hit[0]))
    return None


def best_alpha(instance: Instance2D, profile: MmsProfile, variant: Tag = Tag.ALPHA_MMS,
               space="V", threads: int = 1, tolerance: Fraction = Fraction(1, 2**40)) -> AlphaResult:
    """Supremum of the alphas supported by some allocation, with a witness.

    Each agent's requirement is linear in alpha or in 1/alpha for every variant
    except ALPHA_MMS_II, so the supported set of one allocation is an interval
    with rational endpoints and the supremum is exact. ALPHA_MMS_II mixes both
    terms; its endpoints are roots of quadratics, and the supremum is bracketed
    by exact bisection instead (``exact=False``).
    """
    variant = Tag(variant)
    space = Space.parse(space)
    if variant not in ALPHA_TAGS:
        raise Unsupported(variant)
    if kind_of(instance.w) is Kind.MIXED:
        raise Unsupported("alpha-MMS variants are studied for GOODS or CHORES only")
    if variant in (Tag.ALPHA_MMS_I, Tag.ALPHA_MMS_II) and space is not Space.V:
        raise WrongSpace(f"{variant.value} is defined on 2-D utilities")
    view = view_of(instance, space)
    coeffs = _coefficients(instance, profile, variant, space)
    mus = profile.mu(space)
    zero_mu = tuple(i for i, mu in enumerate(mus) if mu == 0) if variant is Tag.ALPHA_MMS else ()
    range_lo, range_closed = alpha_range(variant, mus)

    if all(d == 0 or e == 0 for _, d, e in coeffs):
        best_hi, best_idx = None, None
        for lo, table in own_blocks(view, threads):
            hi, idx = _best_row(table, coeffs, view.scale, range_lo, range_closed)
            if hi is None:
                continue
            idx += lo
            if best_hi is None or hi > best_hi or (hi == best_hi and idx < best_idx):
                best_hi, best_idx = hi, idx
        if best_hi is None:
            return AlphaResult("NONE", None, None, zero_mu=zero_mu)
        witness = allocation_at(view.n, view.m, best_idx)
        status = "ALL" if best_hi == 1 else "VALUE"
        return AlphaResult(status, best_hi, witness, zero_mu=zero_mu)

    if any(d < 0 or e > 0 for _, d, e in coeffs):
        raise Unsupported("alpha-MMS (II) with mu+ < 0 or mu- > 0 is not monotone in alpha")

    def support(t):
        return supporting_allocation(instance, profile, variant, t, space, threads)

    w1 = support(Fraction(1))
    if w1 is not None:
        return AlphaResult("ALL", Fraction(1), w1, zero_mu=zero_mu)
    # some alpha > 0 works iff some allocation meets every share in the limit alpha -> 0+
    scale = view.scale
    feasible_near_zero = False
    for lo, table in own_blocks(view, threads):
        ok = np.ones(len(table), dtype=bool)
        for i, (c, d, e) in enumerate(coeffs):
            if e < 0:
                continue
            cs = c * scale
            col = table[:, i]
            if cs.denominator == 1:
                near = col > int(cs)
                if d <= 0:
                    near |= col == int(cs)
            else:
                near = col > math.floor(cs)
            ok &= np.asarray(near, dtype=bool)
        if ok.any():
            feasible_near_zero = True
            break
    if not feasible_near_zero:
        return AlphaResult("NONE", None, None, zero_mu=zero_mu)
    t_hi, t_lo = Fraction(1), Fraction(1, 2)
    w = support(t_lo)
    while w is None and t_lo > tolerance:
        t_hi, t_lo = t_lo, t_lo / 2
        w = support(t_lo)
    if w is None:
        # feasible only for alphas below the tolerance
        return AlphaResult("VALUE", Fraction(0), None, exact=False, upper=t_lo, zero_mu=zero_mu)
    while t_hi - t_lo > tolerance:
        mid = (t_lo + t_hi) / 2
        wm = support(mid)
        if wm is None:
            t_hi = mid
        else:
            t_lo, w = mid, wm
    return AlphaResult("VALUE", t_lo, w, exact=False, upper=t_hi, zero_mu=zero_mu)
