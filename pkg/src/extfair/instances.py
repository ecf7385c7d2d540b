"""Named benchmark instances, built with exact rational entries."""
from __future__ import annotations

import enum
from fractions import Fraction

from .core import BadEpsilon, Instance2D, as_rational


class BuiltinId(enum.Enum):
    INTRO_2GOODS = "intro-2goods"
    EXAMPLE1_LEXIMIN = "example1-leximin"
    EXAMPLE2_PROPXE = "example2-propxe"
    PROP_PROOF_GOODS = "prop-proof-goods"
    EXAMPLE_CHORES_NEG = "example-chores-neg"
    VG_GOODS = "vg-goods"
    VC_CHORES = "vc-chores"
    VG_APPENDIX = "vg-appendix"
    EQ_COUNTEREX = "eq-counterex"
    MEW_COUNTEREX = "mew-counterex"

    @classmethod
    def parse(cls, x) -> "BuiltinId":
        if isinstance(x, cls):
            return x
        key = str(x).strip()
        for b in cls:
            if key.upper().replace("-", "_") == b.name or key.lower() == b.value:
                return b
        raise KeyError(f"unknown builtin {x!r}")


F = Fraction


def table_one(e1: Fraction, e2: Fraction) -> list[list[tuple[Fraction, Fraction]]]:
    """The 3-agent, 12-item base profile; ``rows[k][i] = (v_ik, v'_ik)``."""

    def big(x):
        return (x - e1, -e1)

    def small(x):
        return (2 * e1, -x + 2 * e1 + e2)

    k1 = (3 * e2, -1017 + 3 * e1 - 3 * e2)
    return [
        [k1, k1, k1],
        [small(1025), small(1025), big(1025)],
        [small(1012), big(1012), small(1012)],
        [small(1001), big(1001), big(1001)],
        [big(1002), small(1002), big(1002)],
        [big(1022)] * 3,
        [big(1003), big(1003), small(1003)],
        [big(1028)] * 3,
        [big(1011), small(1011), big(1011)],
        [big(1000)] * 3,
        [big(1021)] * 3,
        [big(1023), big(1023), small(1023)],
    ]


def _from_rows(rows, factor, item_ids=()) -> Instance2D:
    n, m = len(rows[0]), len(rows)
    v = [[rows[k][i][0] * factor for k in range(m)] for i in range(n)]
    vp = [[rows[k][i][1] * factor for k in range(m)] for i in range(n)]
    return Instance2D(v, vp, item_ids)


def _eps(value, default, name: str, lo=None, hi=None, positive=None) -> Fraction:
    e = as_rational(default if value is None else value)
    if positive is True and e <= 0:
        raise BadEpsilon(f"{name} must be positive, got {e}")
    if positive is False and e >= 0:
        raise BadEpsilon(f"{name} must be negative, got {e}")
    if hi is not None and e > hi:
        raise BadEpsilon(f"{name} must be at most {hi}, got {e}")
    if lo is not None and e < lo:
        raise BadEpsilon(f"{name} must be at least {lo}, got {e}")
    return e


K_IDS = tuple(f"k{k}" for k in range(1, 13))


def builtin(which, eps1=None, eps2=None, eps3=None) -> Instance2D:
    """Build a named instance; the three table profiles take epsilon parameters."""
    b = BuiltinId.parse(which)
    if b is BuiltinId.INTRO_2GOODS:
        return Instance2D([[6, 5], [5, 6]], [[-1, -100], [-100, -1]], ("g1", "g2"))
    if b is BuiltinId.EXAMPLE1_LEXIMIN:
        a = [(-30, 1), (-20, 1), (-30, 1), (-30, 1)]
        c = [(-1, 40)] * 4
        return Instance2D.from_pairs([a, a, c], ("c1", "c2", "c3", "c4"))
    if b is BuiltinId.EXAMPLE2_PROPXE:
        row = [(-9, 1), (-11, 1), (-12, 1), (-13, 1), (-9, 1), (-1, 38)]
        return Instance2D.identical(2, row, tuple(f"c{k}" for k in range(1, 7)))
    if b is BuiltinId.PROP_PROOF_GOODS:
        half, tenth = F(1, 2), F(1, 10)
        row = [(half, tenth), (half, tenth), (F(3, 10), tenth), (half, tenth), (half, tenth), (half, tenth)]
        return Instance2D.identical(2, row, tuple(f"g{k}" for k in range(1, 7)))
    if b is BuiltinId.EXAMPLE_CHORES_NEG:
        row = [(-40, -36), (-110, -70), (-109, -71)]
        return Instance2D.identical(2, row, ("c1", "c2", "c3"))
    if b is BuiltinId.VG_GOODS:
        e1 = _eps(eps1, F(1, 10**4), "eps1", hi=F(1, 10**4), positive=True)
        e2 = _eps(eps2, F(1, 10**3), "eps2", positive=True)
        return _from_rows(table_one(e1, e2), 1000, K_IDS)
    if b is BuiltinId.VC_CHORES:
        e1 = _eps(eps1, F(1, 10**4), "eps1", hi=F(1, 10**4), positive=True)
        e2 = _eps(eps2, F(-1, 10**3), "eps2", positive=False)
        return _from_rows(table_one(e1, e2), -1000, K_IDS)
    if b is BuiltinId.VG_APPENDIX:
        e1 = _eps(eps1, F(1, 10**5), "eps1", hi=F(1, 10**5), positive=True)
        e2 = _eps(eps2, F(1, 10**3), "eps2", positive=True)
        e3 = _eps(eps3, F(1, 10**4), "eps3", positive=True)
        rows = table_one(e1, e2)
        # overrides are stated in base-table units; the whole profile is then scaled by 10 * 10^3
        rows[9][0] = rows[9][1] = (1000 - e1 + e3, -e1)
        rows[3][0] = (1001 - e1 + e3, -e1)
        rows[7] = [(1028 - e1 + e3, -e1)] * 3
        return _from_rows(rows, 10**4, K_IDS)
    if b is BuiltinId.EQ_COUNTEREX:
        return Instance2D.from_pairs(
            [[(3, -6), (3, -6), (1, -3), (1, -3)], [(1, -8), (1, -8), (3, -6), (3, -6)]],
            ("g1", "g2", "g3", "g4"),
        )
    if b is BuiltinId.MEW_COUNTEREX:
        return Instance2D.from_pairs([[(8, -16), (10, -15)], [(5, -1), (6, -2)]], ("g1", "g2"))
    raise KeyError(b)
