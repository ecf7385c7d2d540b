"""Integer-scaled valuation views shared by the checkers and exhaustive scans.

A view stores, per agent and item, the scaled value of holding the item
(``inside``) and of not holding it (``outside``). Every entry is an exact
integer: the instance's rationals multiplied by the lcm of their denominators.
Positive scaling preserves every comparison the checkers make.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from functools import cached_property

import numpy as np

from .core import Instance1D, Instance2D, ItemClass, WrongSpace, item_class

_INT64_SAFE = 2**62


class Space(enum.Enum):
    V = "V"
    W = "W"
    FULL = "FULL"

    @classmethod
    def parse(cls, s) -> "Space":
        if isinstance(s, Space):
            return s
        try:
            return cls(str(s).upper())
        except ValueError:
            raise WrongSpace(f"unknown space {s!r}") from None


def _lcm_of_denominators(rows) -> int:
    d = 1
    for row in rows:
        for x in row:
            d = math.lcm(d, x.denominator)
    return d


def _to_array(rows, m: int):
    flat = [abs(x) for r in rows for x in r]
    # own values, welfare sums and n-fold thresholds must all stay in range
    bound = max(flat, default=0) * (m + 1) * (len(rows) + 1) * 4
    dtype = np.int64 if bound < _INT64_SAFE else object
    return np.array(rows, dtype=dtype).reshape(len(rows), m)


class ScaledView:
    """Additive valuation where holding S is worth sum(inside[S]) + sum(outside[M - S])."""

    def __init__(self, space: Space, inside, outside, w, item_ids):
        self.space = space
        self.n = len(inside)
        self.m = len(inside[0])
        self.item_ids = item_ids
        self.scale = _lcm_of_denominators(list(inside) + list(outside))
        d = self.scale
        self.inside = [[int(x * d) for x in row] for row in inside]
        self.outside = [[int(x * d) for x in row] for row in outside]
        self.classes = [[item_class(x) for x in row] for row in w]
        self._cache: dict = {}

    def rational(self, x) -> Fraction:
        return Fraction(int(x), self.scale)

    def value(self, agent: int, mask: int) -> int:
        key = (agent, mask)
        hit = self._cache.get(key)
        if hit is None:
            ins, outs = self.inside[agent], self.outside[agent]
            hit = sum(ins[k] if mask >> k & 1 else outs[k] for k in range(self.m))
            self._cache[key] = hit
        return hit

    def is_good(self, agent: int, k: int) -> bool:
        """Good or neutral: the 'add / remove from the other bundle' branch."""
        return self.classes[agent][k] is not ItemClass.CHORE

    def is_chore(self, agent: int, k: int) -> bool:
        return self.classes[agent][k] is ItemClass.CHORE

    # vectorized helpers -----------------------------------------------------

    @cached_property
    def inside_arr(self):
        return _to_array(self.inside, self.m)

    @cached_property
    def outside_arr(self):
        return _to_array(self.outside, self.m)

    def holder_values(self, agent: int, assign: np.ndarray, holder: int) -> np.ndarray:
        """For each row: agent's value of the bundle held by ``holder``."""
        if self.m == 0:
            return np.zeros(len(assign), dtype=np.int64)
        vals = np.where(assign == holder, self.inside_arr[agent], self.outside_arr[agent])
        return vals.sum(axis=1)

    def own_values(self, assign: np.ndarray) -> np.ndarray:
        """Shape (rows, n): each agent's value of its own bundle."""
        return np.stack([self.holder_values(i, assign, i) for i in range(self.n)], axis=1)

    @cached_property
    def own_table(self) -> np.ndarray:
        """Own-bundle values for every allocation in enumeration order (cached)."""
        from .core import allocation_count, assignment_block

        total = allocation_count(self.n, self.m)
        return self.own_values(assignment_block(self.n, self.m, 0, total))


def view_of(instance, space) -> ScaledView:
    """The scaled view of ``instance`` in ``space``, memoized on the instance itself."""
    space = Space.parse(space)
    cache = instance.__dict__.setdefault("_views", {})
    hit = cache.get(space)
    if hit is None:
        hit = cache[space] = _build_view(instance, space)
    return hit


def _build_view(instance, space: Space) -> ScaledView:
    if isinstance(instance, Instance2D):
        if space is Space.V:
            return ScaledView(space, instance.v, instance.vprime, instance.w, instance.item_ids)
        if space is Space.W:
            w = instance.w
            zeros = [[Fraction(0)] * instance.m for _ in range(instance.n)]
            return ScaledView(space, w, zeros, w, instance.item_ids)
    elif isinstance(instance, Instance1D):
        if space is Space.W:
            zeros = [[Fraction(0)] * instance.m for _ in range(instance.n)]
            return ScaledView(space, instance.w, zeros, instance.w, instance.item_ids)
        raise WrongSpace("a 1-D instance only lives in space W")
    raise WrongSpace(f"space {space.value} is not available for {type(instance).__name__}")
