"""Exact data model: rationals, 2-D / 1-D / full-externality instances, allocations.

Every number is a :class:`fractions.Fraction`. Strings such as ``"0.0001"`` are
parsed exactly, never through a float.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

#: Upper bound on n**m for any exhaustive enumeration.
ENUMERATION_GUARD = 2**48


class ExtfairError(Exception):
    """Base class for library errors."""


class InvalidAllocation(ExtfairError, ValueError):
    pass


class InvalidInstance(ExtfairError, ValueError):
    pass


class TooLarge(ExtfairError):
    pass


class WrongSpace(ExtfairError, ValueError):
    pass


class UnsupportedLevel(ExtfairError, ValueError):
    pass


class Unsupported(ExtfairError, ValueError):
    pass


class MixedSigns(ExtfairError, ValueError):
    pass


class MissingProfile(ExtfairError, ValueError):
    pass


class BadAlpha(ExtfairError, ValueError):
    pass


class BadRational(ExtfairError, ValueError):
    pass


class BadEpsilon(ExtfairError, ValueError):
    pass


# --------------------------------------------------------------------------- rationals

_FRACTION_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_DECIMAL_RE = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")


def as_rational(x) -> Fraction:
    """Convert ``x`` to a Fraction without any rounding.

    Accepts Fractions, ints, and strings of the forms ``"-40"``, ``"3/1000"``
    and ``"0.0001"`` (optionally with an exponent). Floats and bools are
    rejected because they may already carry rounding error.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise BadRational(f"refusing inexact value {x!r}; pass a string or int")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if _FRACTION_RE.match(s):
            num, _, den = s.partition("/")
            if den and int(den) == 0:
                raise BadRational(f"zero denominator in {x!r}")
            return Fraction(int(num), int(den) if den else 1)
        if _DECIMAL_RE.match(s):
            return Fraction(s)
        raise BadRational(f"malformed number {x!r}")
    raise BadRational(f"unsupported numeric type {type(x).__name__}")


def format_rational(q: Fraction) -> str:
    """Canonical text form: ``"p"`` for integers, ``"p/q"`` otherwise."""
    return str(q)


def _matrix(rows, n: int | None = None, m: int | None = None, name: str = "matrix"):
    out = tuple(tuple(as_rational(x) for x in row) for row in rows)
    if n is not None and len(out) != n:
        raise InvalidInstance(f"{name} has {len(out)} rows, expected {n}")
    if out:
        width = len(out[0]) if m is None else m
        for r in out:
            if len(r) != width:
                raise InvalidInstance(f"{name} is ragged")
    return out


# --------------------------------------------------------------------------- classification


class ItemClass(enum.Enum):
    GOOD = "good"
    CHORE = "chore"
    NEUTRAL = "neutral"


class Kind(enum.Enum):
    GOODS = "goods"
    CHORES = "chores"
    MIXED = "mixed"


class Externality(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    MIXED = "mixed"


def item_class(w: Fraction) -> ItemClass:
    if w > 0:
        return ItemClass.GOOD
    if w < 0:
        return ItemClass.CHORE
    return ItemClass.NEUTRAL


def kind_of(w_rows: Sequence[Sequence[Fraction]]) -> Kind:
    flat = [x for row in w_rows for x in row]
    if all(x >= 0 for x in flat):
        return Kind.GOODS
    if all(x <= 0 for x in flat):
        return Kind.CHORES
    return Kind.MIXED


# --------------------------------------------------------------------------- instances


def _default_ids(m: int) -> tuple[str, ...]:
    return tuple(f"k{k + 1}" for k in range(m))


@dataclass(frozen=True)
class Instance2D:
    """n agents, m items; ``v[i][k]`` if agent i receives k, ``vprime[i][k]`` otherwise."""

    v: tuple
    vprime: tuple
    item_ids: tuple = ()

    def __post_init__(self):
        v = _matrix(self.v, name="v")
        if not v:
            raise InvalidInstance("an instance needs at least one agent")
        m = len(v[0])
        vp = _matrix(self.vprime, len(v), m, name="vprime")
        ids = tuple(self.item_ids) if self.item_ids else _default_ids(m)
        if len(ids) != m:
            raise InvalidInstance(f"{len(ids)} item ids for {m} items")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "vprime", vp)
        object.__setattr__(self, "item_ids", tuple(str(x) for x in ids))

    @property
    def n(self) -> int:
        return len(self.v)

    @property
    def m(self) -> int:
        return len(self.v[0])

    @property
    def w(self) -> tuple:
        return tuple(
            tuple(a - b for a, b in zip(rv, rp)) for rv, rp in zip(self.v, self.vprime)
        )

    @classmethod
    def from_pairs(cls, pairs, item_ids=()) -> "Instance2D":
        """Build from ``pairs[i][k] = (v_ik, v'_ik)``."""
        pairs = [list(row) for row in pairs]
        v = [[p[0] for p in row] for row in pairs]
        vp = [[p[1] for p in row] for row in pairs]
        return cls(v, vp, item_ids)

    @classmethod
    def identical(cls, n: int, pairs, item_ids=()) -> "Instance2D":
        return cls.from_pairs([list(pairs)] * n, item_ids)

    def scaled(self, factor) -> "Instance2D":
        f = as_rational(factor)
        return Instance2D(
            [[x * f for x in r] for r in self.v],
            [[x * f for x in r] for r in self.vprime],
            self.item_ids,
        )


@dataclass(frozen=True)
class Instance1D:
    """Additive 1-D valuations ``w[i][k]``."""

    w: tuple
    item_ids: tuple = ()

    def __post_init__(self):
        w = _matrix(self.w, name="w")
        if not w:
            raise InvalidInstance("an instance needs at least one agent")
        m = len(w[0])
        ids = tuple(self.item_ids) if self.item_ids else _default_ids(m)
        if len(ids) != m:
            raise InvalidInstance(f"{len(ids)} item ids for {m} items")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "item_ids", tuple(str(x) for x in ids))

    @property
    def n(self) -> int:
        return len(self.w)

    @property
    def m(self) -> int:
        return len(self.w[0])


@dataclass(frozen=True)
class FullInstance:
    """``v_full[i][j][k]``: what agent i gets when item k goes to agent j."""

    v_full: tuple
    item_ids: tuple = ()

    def __post_init__(self):
        t = tuple(_matrix(block, name="v_full block") for block in self.v_full)
        n = len(t)
        if n == 0:
            raise InvalidInstance("an instance needs at least one agent")
        m = len(t[0][0]) if t[0] else 0
        for block in t:
            if len(block) != n or any(len(row) != m for row in block):
                raise InvalidInstance("v_full must be n x n x m")
        ids = tuple(self.item_ids) if self.item_ids else _default_ids(m)
        if len(ids) != m:
            raise InvalidInstance(f"{len(ids)} item ids for {m} items")
        object.__setattr__(self, "v_full", t)
        object.__setattr__(self, "item_ids", tuple(str(x) for x in ids))

    @property
    def n(self) -> int:
        return len(self.v_full)

    @property
    def m(self) -> int:
        return len(self.v_full[0][0])

    @classmethod
    def embed(cls, inst: Instance2D) -> "FullInstance":
        """The 2-D instance as a full-externality tensor."""
        n = inst.n
        return cls(
            [
                [inst.v[i] if j == i else inst.vprime[i] for j in range(n)]
                for i in range(n)
            ],
            inst.item_ids,
        )


# --------------------------------------------------------------------------- allocations


@dataclass(frozen=True)
class Allocation:
    """``assignment[k]`` is the agent holding item k."""

    assignment: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))

    @property
    def m(self) -> int:
        return len(self.assignment)

    def bundle(self, agent: int) -> frozenset:
        return frozenset(k for k, a in enumerate(self.assignment) if a == agent)

    def bundles(self, n: int) -> list[frozenset]:
        out = [set() for _ in range(n)]
        for k, a in enumerate(self.assignment):
            out[a].add(k)
        return [frozenset(b) for b in out]

    def masks(self, n: int) -> list[int]:
        out = [0] * n
        for k, a in enumerate(self.assignment):
            out[a] |= 1 << k
        return out

    @classmethod
    def from_bundles(cls, bundles: Sequence[Iterable[int]], m: int) -> "Allocation":
        assignment = [-1] * m
        for agent, bundle in enumerate(bundles):
            for k in bundle:
                if assignment[k] != -1:
                    raise InvalidAllocation(f"item {k} assigned twice")
                assignment[k] = agent
        if -1 in assignment:
            raise InvalidAllocation(f"item {assignment.index(-1)} unassigned")
        return cls(assignment)

    def validate(self, n: int, m: int) -> "Allocation":
        if len(self.assignment) != m:
            raise InvalidAllocation(f"allocation covers {len(self.assignment)} items, instance has {m}")
        for k, a in enumerate(self.assignment):
            if not 0 <= a < n:
                raise InvalidAllocation(f"item {k} assigned to agent {a}, outside [0, {n})")
        return self

    def __str__(self) -> str:
        n = max(self.assignment, default=-1) + 1
        return "{" + ", ".join(
            "(" + ",".join(str(k) for k in sorted(b)) + ")" for b in self.bundles(n)
        ) + "}"


# --------------------------------------------------------------------------- utilities


def utility_2d(instance: Instance2D, agent: int, alloc: Allocation) -> Fraction:
    alloc.validate(instance.n, instance.m)
    if not 0 <= agent < instance.n:
        raise InvalidAllocation(f"no agent {agent}")
    v, vp = instance.v[agent], instance.vprime[agent]
    return sum(
        (v[k] if a == agent else vp[k] for k, a in enumerate(alloc.assignment)),
        Fraction(0),
    )


def utility_1d(instance: Instance1D, agent: int, alloc: Allocation) -> Fraction:
    alloc.validate(instance.n, instance.m)
    if not 0 <= agent < instance.n:
        raise InvalidAllocation(f"no agent {agent}")
    w = instance.w[agent]
    return sum((w[k] for k, a in enumerate(alloc.assignment) if a == agent), Fraction(0))


def utility_full(instance: FullInstance, agent: int, alloc: Allocation) -> Fraction:
    alloc.validate(instance.n, instance.m)
    if not 0 <= agent < instance.n:
        raise InvalidAllocation(f"no agent {agent}")
    t = instance.v_full[agent]
    return sum((t[a][k] for k, a in enumerate(alloc.assignment)), Fraction(0))


def bundle_utility_2d(instance: Instance2D, agent: int, bundle: Iterable[int]) -> Fraction:
    """Agent's utility when holding exactly ``bundle``: v_i(S) + v'_i(M \\ S)."""
    s = set(bundle)
    v, vp = instance.v[agent], instance.vprime[agent]
    return sum((v[k] if k in s else vp[k] for k in range(instance.m)), Fraction(0))


@dataclass(frozen=True)
class Classification:
    kind: Kind
    externality: Externality
    correlated: bool | None
    per_item: tuple

    @property
    def inverse(self) -> bool | None:
        return None if self.correlated is None else not self.correlated


def classify(instance: Instance2D) -> Classification:
    w = instance.w
    kind = kind_of(w)
    vp = [x for row in instance.vprime for x in row]
    if all(x >= 0 for x in vp):
        ext = Externality.POSITIVE
    elif all(x <= 0 for x in vp):
        ext = Externality.NEGATIVE
    else:
        ext = Externality.MIXED
    if kind is Kind.MIXED or ext is Externality.MIXED:
        correlated = None
    else:
        correlated = (kind is Kind.GOODS) == (ext is Externality.POSITIVE)
    per_item = tuple(tuple(item_class(x) for x in row) for row in w)
    return Classification(kind, ext, correlated, per_item)


# --------------------------------------------------------------------------- enumeration


def allocation_count(n: int, m: int) -> int:
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    total = n**m
    if total > ENUMERATION_GUARD:
        raise TooLarge(f"{n}^{m} allocations exceeds the enumeration guard 2^48")
    return total


def allocation_at(n: int, m: int, index: int) -> Allocation:
    digits = []
    for _ in range(m):
        index, d = divmod(index, n)
        digits.append(d)
    return Allocation(digits)


def allocation_index(alloc: Allocation, n: int) -> int:
    idx = 0
    for a in reversed(alloc.assignment):
        idx = idx * n + a
    return idx


def enumerate_allocations(n: int, m: int, lo: int = 0, hi: int | None = None) -> Iterator[Allocation]:
    """All n**m allocations as a base-n counter, item 0 least significant.

    ``lo``/``hi`` select the half-open index range [lo, hi).
    """
    total = allocation_count(n, m)
    hi = total if hi is None else min(hi, total)
    if lo >= hi:
        return
    digits = allocation_at(n, m, lo).assignment
    cur = list(digits)
    for _ in range(lo, hi):
        yield Allocation(cur)
        for k in range(m):
            cur[k] += 1
            if cur[k] < n:
                break
            cur[k] = 0


BLOCK_ROWS = 1 << 16


def assignment_block(n: int, m: int, lo: int, hi: int) -> np.ndarray:
    """Rows lo..hi-1 of the enumeration as an int8/int16 array of shape (hi-lo, m)."""
    idx = np.arange(lo, hi, dtype=np.int64)
    dtype = np.int8 if n < 128 else np.int32
    out = np.empty((hi - lo, m), dtype=dtype)
    for k in range(m):
        idx, d = np.divmod(idx, n)
        out[:, k] = d
    return out


def block_ranges(n: int, m: int, rows: int = BLOCK_ROWS) -> list[tuple[int, int]]:
    total = allocation_count(n, m)
    return [(lo, min(lo + rows, total)) for lo in range(0, total, rows)]


def map_blocks(fn, n: int, m: int, threads: int = 1, rows: int = BLOCK_ROWS) -> list:
    """Apply ``fn(lo, assign)`` to every enumeration block; results in block order."""
    ranges = block_ranges(n, m, rows)

    def run(r):
        lo, hi = r
        return fn(lo, assignment_block(n, m, lo, hi))

    if threads <= 1 or len(ranges) == 1:
        return [run(r) for r in ranges]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(run, ranges))
