"""The 2-D to 1-D valuation transformation and its sanity reports."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import (
    Allocation,
    Instance1D,
    Instance2D,
    Kind,
    utility_1d,
    utility_2d,
)


@dataclass(frozen=True)
class TransformResult:
    one_d: Instance1D
    shift: tuple  # per agent: v'_i(M)


def transform(instance: Instance2D) -> TransformResult:
    """w_ik = v_ik - v'_ik, shift_i = sum_k v'_ik.

    For every agent and allocation, utility_2d == utility_1d + shift.
    """
    w = [[a - b for a, b in zip(rv, rp)] for rv, rp in zip(instance.v, instance.vprime)]
    shift = tuple(sum(row, Fraction(0)) for row in instance.vprime)
    return TransformResult(Instance1D(w, instance.item_ids), shift)


@dataclass(frozen=True)
class Lemma1Report:
    normalized: bool
    monotone: bool
    sign_ok: bool
    witness: tuple | None  # (agent, item) breaking the sign pattern

    @property
    def ok(self) -> bool:
        return self.normalized and self.monotone and self.sign_ok


def verify_lemma1(result: TransformResult, kind: Kind) -> Lemma1Report:
    """Normalization, (anti-)monotonicity and sign of the transformed valuations.

    For additive valuations the empty bundle is worth 0 by construction, and
    both monotonicity and the sign of every bundle reduce to the sign of each
    single-item value. For chores the sign condition is non-positivity.
    """
    if kind is Kind.MIXED:
        raise ValueError("the sign report needs GOODS or CHORES")
    want_nonneg = kind is Kind.GOODS
    witness = None
    for i, row in enumerate(result.one_d.w):
        for k, x in enumerate(row):
            if (x < 0) if want_nonneg else (x > 0):
                witness = (i, k)
                break
        if witness:
            break
    ok = witness is None
    return Lemma1Report(normalized=True, monotone=ok, sign_ok=ok, witness=witness)


def check_shift_consistency(
    instance: Instance2D,
    sample_allocs: Iterable[Allocation],
    result: TransformResult | None = None,
) -> bool:
    """utility_2d == utility_1d + shift on every sampled allocation."""
    result = result or transform(instance)
    for alloc in sample_allocs:
        for i in range(instance.n):
            if utility_2d(instance, i, alloc) != utility_1d(result.one_d, i, alloc) + result.shift[i]:
                return False
    return True
